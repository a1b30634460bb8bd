//! Named instance families and a reproducible random generator.

use thiserror::Error;

use crate::graph::{Instance, VertexId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GeneratorError {
    #[error("counter width {0} outside 1..=62")]
    CounterWidth(usize),
    #[error("random instances need at least 2 vertices, got {0}")]
    TooFewVertices(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Counter,
    Zigzag,
    Trap,
    Direct,
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GeneratorSpec {
    pub family: Family,
    /// Counter bit width or random vertex count; ignored otherwise.
    pub n: usize,
    pub seed: u64,
}

impl GeneratorSpec {
    pub fn generate(&self) -> Result<Instance, GeneratorError> {
        match self.family {
            Family::Counter => gen_counter(self.n),
            Family::Zigzag => Ok(gen_zigzag()),
            Family::Trap => Ok(gen_trap()),
            Family::Direct => Ok(gen_direct()),
            Family::Random => gen_random(self.n, self.seed),
        }
    }
}

fn build(names: &[&str], succ: &[(&str, &str, &str)]) -> Instance {
    Instance::from_names(names, succ, "o", "d").expect("fixed family is well formed")
}

/// `o → d` with a self-loop at `d`.
pub fn gen_direct() -> Instance {
    build(&["o", "d"], &[("o", "d", "d"), ("d", "d", "d")])
}

/// `o → t`, `t` loops forever, `d` is unreachable.
pub fn gen_trap() -> Instance {
    build(
        &["o", "t", "d"],
        &[("o", "t", "t"), ("t", "t", "t"), ("d", "d", "d")],
    )
}

/// `o → w`; `w` goes even to `u`, odd to `d`; `u → w`.
///
/// Its run profile uses every edge once, but raising `w→u` and `u→w` to 2
/// is also a switching flow, one that no run follows.
pub fn gen_zigzag() -> Instance {
    build(
        &["o", "w", "u", "d"],
        &[
            ("o", "w", "w"),
            ("w", "u", "d"),
            ("u", "w", "w"),
            ("d", "d", "d"),
        ],
    )
}

/// Binary counter on `n` switches `v1..vn`.
///
/// Every pass `o → v1` increments the number whose bit i is the switch at
/// `v_i`: a switch that is clear sets itself and returns to `o`, a set one
/// clears itself and carries to the next switch. The carry out of `vn`
/// reaches `d` after the counter wrapped from 2ⁿ−1 back to 0, taking
/// 3·2ⁿ − 2 traversals in total.
pub fn gen_counter(n: usize) -> Result<Instance, GeneratorError> {
    if !(1..=62).contains(&n) {
        return Err(GeneratorError::CounterWidth(n));
    }
    let mut names = Vec::with_capacity(n + 2);
    names.push("o".to_string());
    names.extend((1..=n).map(|i| format!("v{i}")));
    names.push("d".to_string());
    let o = VertexId(0);
    let d = VertexId(n + 1);
    let mut even = vec![VertexId(1)];
    let mut odd = vec![VertexId(1)];
    for i in 1..=n {
        even.push(o);
        odd.push(if i < n { VertexId(i + 1) } else { d });
    }
    even.push(d);
    odd.push(d);
    Ok(Instance::new(names, even, odd, o, d).expect("counter family is well formed"))
}

/// SplitMix64: `state += 0x9E3779B97F4A7C15`, then the output is `state`
/// mixed by `z ^= z >> 30; z *= 0xBF58476D1CE4E5B9; z ^= z >> 27;
/// z *= 0x94D049BB133111EB; z ^= z >> 31` (wrapping arithmetic).
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// `next_u64() % bound`.
    pub fn below(&mut self, bound: u64) -> u64 {
        self.next_u64() % bound
    }
}

/// Random instance on vertices `x0..x{n-1}` with origin `x0` and
/// destination `x{n-1}`.
///
/// A [`SplitMix64`] stream seeded with `seed` is consumed vertex by vertex
/// in order: even target `x{r % n}`, then odd target `x{r % n}`, each from
/// one draw `r`.
pub fn gen_random(n: usize, seed: u64) -> Result<Instance, GeneratorError> {
    if n < 2 {
        return Err(GeneratorError::TooFewVertices(n));
    }
    let mut rng = SplitMix64::new(seed);
    let mut even = Vec::with_capacity(n);
    let mut odd = Vec::with_capacity(n);
    for _ in 0..n {
        even.push(VertexId(rng.below(n as u64) as usize));
        odd.push(VertexId(rng.below(n as u64) as usize));
    }
    let names = (0..n).map(|i| format!("x{i}")).collect();
    Ok(Instance::new(names, even, odd, VertexId(0), VertexId(n - 1))
        .expect("random instances are well formed"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{decide, simulate};
    use crate::graph::{parse_instance, serialize_instance};

    #[test]
    fn splitmix_reference_values() {
        // first outputs for seed 0 of the reference SplitMix64
        let mut rng = SplitMix64::new(0);
        assert_eq!(rng.next_u64(), 0xE220_A839_7B1D_CDAF);
        assert_eq!(rng.next_u64(), 0x6E78_9E6A_A1B9_65F4);
    }

    #[test]
    fn counter_small_cases() {
        let c1 = gen_counter(1).unwrap();
        let d = decide(&c1, None).unwrap();
        assert_eq!(d.steps(), &4u32.into());

        let c2 = gen_counter(2).unwrap();
        assert_eq!(c2.vertex_count(), 4);
        assert_eq!(c2.edge_count(), 6);
        assert_eq!(decide(&c2, None).unwrap().steps(), &10u32.into());
    }

    #[test]
    fn counter_width_bounds() {
        assert_eq!(gen_counter(0).unwrap_err(), GeneratorError::CounterWidth(0));
        assert_eq!(
            gen_counter(63).unwrap_err(),
            GeneratorError::CounterWidth(63)
        );
        assert_eq!(gen_counter(62).unwrap().vertex_count(), 64);
    }

    #[test]
    fn counter_steps_double_plus_two() {
        let mut prev = None;
        for n in 1..=15 {
            let steps = simulate(&gen_counter(n).unwrap(), u64::MAX)
                .unwrap()
                .steps()
                .clone();
            assert_eq!(steps, ((3u64 << n) - 2).into(), "n = {n}");
            if let Some(p) = prev {
                assert_eq!(steps, p * 2u32 + 2u32);
            }
            prev = Some(steps);
        }
    }

    #[test]
    fn random_is_deterministic() {
        assert_eq!(gen_random(8, 42).unwrap(), gen_random(8, 42).unwrap());
        assert_ne!(gen_random(8, 42).unwrap(), gen_random(8, 43).unwrap());
        assert_eq!(
            gen_random(1, 0).unwrap_err(),
            GeneratorError::TooFewVertices(1)
        );
    }

    #[test]
    fn two_vertex_random_instances_halt() {
        for seed in 0..200 {
            let inst = gen_random(2, seed).unwrap();
            decide(&inst, None).unwrap();
        }
    }

    #[test]
    fn families_round_trip() {
        for inst in [
            gen_direct(),
            gen_trap(),
            gen_zigzag(),
            gen_counter(5).unwrap(),
            gen_random(9, 7).unwrap(),
        ] {
            assert_eq!(parse_instance(&serialize_instance(&inst)).unwrap(), inst);
        }
    }
}
