use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value as Json};

/// Field name under which an event's session tag is stored.
pub const SESSION_FIELD: &str = "session";

/// A field value. Only strings and integers exist so that matching and
/// canonical encoding stay exact.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Int(i64),
    Str(String),
}

impl From<&str> for Value {
    fn from(s: &str) -> Self {
        Value::Str(s.to_string())
    }
}

impl From<i64> for Value {
    fn from(i: i64) -> Self {
        Value::Int(i)
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(i) => write!(f, "{i}"),
            Value::Str(s) => f.write_str(s),
        }
    }
}

impl Value {
    fn to_json(&self) -> Json {
        match self {
            Value::Int(i) => Json::from(*i),
            Value::Str(s) => Json::from(s.as_str()),
        }
    }

    fn from_json(v: &Json) -> Option<Value> {
        match v {
            Json::String(s) => Some(Value::Str(s.clone())),
            Json::Number(n) => n.as_i64().map(Value::Int),
            _ => None,
        }
    }
}

/// A concrete occurrence: a name plus a sorted field map. The session tag,
/// when present, is the string field `session`.
///
/// Equality is structural, which coincides with byte-equality of
/// [`Event::canonical`]. Ordering follows the canonical encoding.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Event {
    pub name: String,
    pub fields: BTreeMap<String, Value>,
}

impl Event {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            fields: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.fields.insert(key.to_string(), value.into());
        self
    }

    pub fn session(&self) -> Option<&str> {
        match self.fields.get(SESSION_FIELD) {
            Some(Value::Str(s)) => Some(s),
            _ => None,
        }
    }

    /// `{"fields":{..},"name":"..","session":".."}` with keys sorted; the
    /// session tag is lifted out of `fields` into its own key.
    pub fn to_json(&self) -> Json {
        let mut fields = Map::new();
        for (k, v) in &self.fields {
            if k == SESSION_FIELD && matches!(v, Value::Str(_)) {
                continue;
            }
            fields.insert(k.clone(), v.to_json());
        }
        let mut obj = Map::new();
        obj.insert("fields".into(), Json::Object(fields));
        obj.insert("name".into(), Json::from(self.name.as_str()));
        if let Some(s) = self.session() {
            obj.insert(SESSION_FIELD.into(), Json::from(s));
        }
        Json::Object(obj)
    }

    pub fn from_json(v: &Json) -> Result<Event, String> {
        let obj = v.as_object().ok_or("event must be an object")?;
        let name = obj
            .get("name")
            .and_then(Json::as_str)
            .ok_or("event needs a string `name`")?;
        let mut event = Event::new(name);
        if let Some(fields) = obj.get("fields") {
            let fields = fields.as_object().ok_or("`fields` must be an object")?;
            for (k, v) in fields {
                let value = Value::from_json(v)
                    .ok_or_else(|| format!("field `{k}` must be a string or integer"))?;
                event.fields.insert(k.clone(), value);
            }
        }
        if let Some(s) = obj.get(SESSION_FIELD) {
            let s = s.as_str().ok_or("`session` must be a string")?;
            event
                .fields
                .insert(SESSION_FIELD.into(), Value::Str(s.into()));
        }
        for key in obj.keys() {
            if !matches!(key.as_str(), "name" | "fields" | SESSION_FIELD) {
                return Err(format!("unknown event key `{key}`"));
            }
        }
        Ok(event)
    }

    /// Compact JSON with sorted keys.
    pub fn canonical(&self) -> String {
        self.to_json().to_string()
    }
}

impl Ord for Event {
    fn cmp(&self, other: &Self) -> Ordering {
        if self == other {
            return Ordering::Equal;
        }
        self.canonical().cmp(&other.canonical())
    }
}

impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)?;
        if !self.fields.is_empty() {
            f.write_str("(")?;
            for (i, (k, v)) in self.fields.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{k}={v}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl Serialize for Event {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Event {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = Json::deserialize(d)?;
        Event::from_json(&v).map_err(serde::de::Error::custom)
    }
}

/// Matches events by name and a subset of fields.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EventPattern {
    pub name: String,
    pub constraints: BTreeMap<String, Value>,
}

impl EventPattern {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            constraints: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.constraints.insert(key.to_string(), value.into());
        self
    }

    pub fn matches(&self, event: &Event) -> bool {
        self.name == event.name
            && self
                .constraints
                .iter()
                .all(|(k, v)| event.fields.get(k) == Some(v))
    }
}

impl fmt::Display for EventPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)?;
        if !self.constraints.is_empty() {
            f.write_str("(")?;
            for (i, (k, v)) in self.constraints.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{k}={v}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}
