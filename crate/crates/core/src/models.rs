//! Small reference models in story syntax: the two-button interleaving,
//! the same with a no-two-adjacent-greens rule, and two refined sessions.

/// Green pressed 3 times, red pressed 10 times, no constraints.
pub const BUTTONS: &str = r#"story "green" {
  repeat 3 { request push(color: "green") }
}
story "red" {
  repeat 10 { request push(color: "red") }
}
"#;

/// Once green is pressed it stays blocked until red is pressed.
pub const NO_DOUBLE_GREEN: &str = r#"story "no-double-green" {
  forever {
    waitFor push(color: "green")
    block push(color: "green") until push(color: "red")
  }
}
"#;

/// [`BUTTONS`] plus [`NO_DOUBLE_GREEN`].
pub fn buttons_constrained() -> String {
    format!("{BUTTONS}{NO_DOUBLE_GREEN}")
}

/// HOT in session S1 and COLD in session S2, each refined into `steps`
/// low-level events.
pub fn hot_cold(steps: usize) -> String {
    let seq = |p: &str| {
        (1..=steps)
            .map(|i| format!("{p}_{i}"))
            .collect::<Vec<_>>()
            .join(", ")
    };
    format!(
        r#"event HOT() = [{}]
event COLD() = [{}]
story "hot" {{
  session S1 {{ request HOT }}
}}
story "cold" {{
  session S2 {{ request COLD }}
}}
"#,
        seq("hot"),
        seq("cold")
    )
}
