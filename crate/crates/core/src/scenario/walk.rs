use rand::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;

use crate::dsl::CheckedModel;
use crate::engine::{Engine, Scenario, Strategy};

/// Seed of the `i`-th walk: one SplitMix64 output for `seed + i`.
pub fn walk_seed(seed: u64, i: u64) -> u64 {
    SplitMix64::seed_from_u64(seed.wrapping_add(i)).next_u64()
}

/// `n` independent seeded-random runs, each capped at `max_depth` events.
/// Works on cyclic models; duplicates are kept.
pub fn sample_walk(model: &CheckedModel, n: usize, seed: u64, max_depth: usize) -> Vec<Scenario> {
    let engine = Engine::new(model);
    (0..n as u64)
        .map(|i| engine.run(Strategy::SeededRandom(walk_seed(seed, i)), Some(max_depth)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::compile_str;
    use crate::engine::Terminal;
    use crate::models;

    #[test]
    fn splitmix_reference_values() {
        // first outputs of SplitMix64 seeded with 0 and 1
        assert_eq!(walk_seed(0, 0), 0xe220a8397b1dcdaf);
        assert_eq!(walk_seed(1, 0), 0x910a2dec89025cc1);
        assert_eq!(walk_seed(0, 1), walk_seed(1, 0));
    }

    #[test]
    fn single_run_model_repeats() {
        let model = compile_str("t", r#"story "s" { request a request b }"#).unwrap();
        let walks = sample_walk(&model, 3, 0, 100);
        assert_eq!(walks.len(), 3);
        assert!(walks.iter().all(|w| w == &walks[0]));
    }

    #[test]
    fn constrained_walks_never_repeat_green() {
        let model = compile_str("t", &models::buttons_constrained()).unwrap();
        let walks = sample_walk(&model, 50, 1, 10_000);
        assert_eq!(walks.len(), 50);
        for w in &walks {
            let word: String = w
                .events
                .iter()
                .map(|e| {
                    if e.fields["color"] == "green".into() {
                        'G'
                    } else {
                        'R'
                    }
                })
                .collect();
            assert!(!word.contains("GG"), "{word}");
            assert_eq!(w.terminal, Terminal::Completed);
        }
        assert_eq!(walks, sample_walk(&model, 50, 1, 10_000));
    }

    #[test]
    fn cyclic_model_is_depth_capped() {
        let model = compile_str("t", r#"story "s" { forever { request a } }"#).unwrap();
        let walks = sample_walk(&model, 2, 5, 7);
        assert!(walks
            .iter()
            .all(|w| w.events.len() == 7 && w.terminal == Terminal::DepthCapped));
    }
}
