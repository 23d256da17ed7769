//! Seeded graph generators: uniform random graphs, the Cycle(k) family and
//! batch creation of benchmark directory trees.
//!
//! All output is fully determined by the seed. The PRNG is PCG-64 (MCG
//! variant, `rand_pcg::Pcg64Mcg`, seeded via `seed_from_u64`); floats take
//! the top 53 bits of one output, bounded integers use Lemire rejection
//! sampling. Edge sets are uniform over distinct ordered pairs (Floyd's
//! subset sampling), each pair turning into an attack with the configured
//! probability and into a support otherwise. Every generated file carries a
//! `// generator: ...` header recording these choices.

use std::collections::HashSet;
use std::fmt;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use rand_core::{Rng, SeedableRng};
use rand_pcg::Pcg64Mcg;
use thiserror::Error;

use crate::bag::{Bag, BagBuilder};
use crate::format::serialize_bag;

#[derive(Debug, Error)]
pub enum GenError {
    #[error("graphs need at least one argument")]
    NoArguments,
    #[error("{requested} edges requested but only {available} distinct pairs exist")]
    TooManyEdges { requested: usize, available: usize },
    #[error("attack probability {0} is outside [0,1]")]
    InvalidProbability(f64),
    #[error("constant weight {0} is outside [0,1]")]
    InvalidConstantWeight(f64),
    #[error("the cycle family starts at k = 1")]
    ZeroCycle,
    #[error("benchmark batches need positive size, increments and trials")]
    EmptyBatch,
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// How initial weights are assigned.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeightMode {
    /// Uniform on [0,1).
    Uniform,
    /// Every argument gets the same weight.
    Constant(f64),
}

impl fmt::Display for WeightMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightMode::Uniform => write!(f, "uniform"),
            WeightMode::Constant(c) => write!(f, "constant({c})"),
        }
    }
}

/// Parameters of one random graph.
#[derive(Debug, Clone, PartialEq)]
pub struct GenSpec {
    pub nodes: usize,
    pub edges: usize,
    /// Probability that a sampled pair becomes an attack (else a support).
    pub attack_probability: f64,
    pub weight_mode: WeightMode,
    pub seed: u64,
    /// Whether the sampled pair space includes the diagonal.
    pub self_loops: bool,
}

impl GenSpec {
    pub fn new(nodes: usize, edges: usize, seed: u64) -> Self {
        GenSpec {
            nodes,
            edges,
            attack_probability: 0.5,
            weight_mode: WeightMode::Uniform,
            seed,
            self_loops: true,
        }
    }

    fn pair_space(&self) -> usize {
        if self.self_loops {
            self.nodes * self.nodes
        } else {
            self.nodes * (self.nodes - 1)
        }
    }

    fn validate(&self) -> Result<(), GenError> {
        if self.nodes == 0 {
            return Err(GenError::NoArguments);
        }
        if !(0.0..=1.0).contains(&self.attack_probability) {
            return Err(GenError::InvalidProbability(self.attack_probability));
        }
        if let WeightMode::Constant(c) = self.weight_mode {
            if !(0.0..=1.0).contains(&c) {
                return Err(GenError::InvalidConstantWeight(c));
            }
        }
        if self.edges > self.pair_space() {
            return Err(GenError::TooManyEdges {
                requested: self.edges,
                available: self.pair_space(),
            });
        }
        Ok(())
    }

    /// The `// generator:` header line written in front of serialized output.
    pub fn header(&self) -> String {
        format!(
            "// generator: rng=pcg64mcg seed={} nodes={} edges={} attack_prob={} weights={} self_loops={}",
            self.seed, self.nodes, self.edges, self.attack_probability, self.weight_mode,
            self.self_loops
        )
    }
}

/// Uniform float in [0,1) from the top 53 bits of one PRNG output.
fn next_f64(rng: &mut Pcg64Mcg) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Unbiased integer in [0, bound) via Lemire's widening-multiply rejection.
fn next_below(rng: &mut Pcg64Mcg, bound: u64) -> u64 {
    debug_assert!(bound > 0);
    let mut x = rng.next_u64();
    let mut m = (x as u128) * (bound as u128);
    let mut low = m as u64;
    if low < bound {
        let threshold = bound.wrapping_neg() % bound;
        while low < threshold {
            x = rng.next_u64();
            m = (x as u128) * (bound as u128);
            low = m as u64;
        }
    }
    (m >> 64) as u64
}

/// Maps a flat pair index to an ordered pair, skipping the diagonal when
/// self-loops are disabled.
fn pair_from_index(index: usize, nodes: usize, self_loops: bool) -> (usize, usize) {
    if self_loops {
        (index / nodes, index % nodes)
    } else {
        let src = index / (nodes - 1);
        let off = index % (nodes - 1);
        let tgt = if off >= src { off + 1 } else { off };
        (src, tgt)
    }
}

/// Generates a random graph: `nodes` arguments named `a0..`, `edges`
/// distinct ordered pairs drawn uniformly without replacement, each pair an
/// attack with the configured probability. Identical specs produce
/// structurally identical graphs.
pub fn random_bag(spec: &GenSpec) -> Result<Bag, GenError> {
    spec.validate()?;
    let mut rng = Pcg64Mcg::seed_from_u64(spec.seed);
    let mut builder = BagBuilder::new();
    for i in 0..spec.nodes {
        let weight = match spec.weight_mode {
            WeightMode::Uniform => next_f64(&mut rng),
            WeightMode::Constant(c) => c,
        };
        builder
            .argument(format!("a{i}"), weight)
            .expect("generated names are unique and weights in range");
    }

    // Floyd's algorithm: after the loop `picked` is a uniform size-m subset
    // of the pair space; insertion order keeps the output deterministic.
    let space = spec.pair_space();
    let mut picked: HashSet<usize> = HashSet::with_capacity(spec.edges);
    let mut pairs: Vec<usize> = Vec::with_capacity(spec.edges);
    for j in (space - spec.edges)..space {
        let r = next_below(&mut rng, (j + 1) as u64) as usize;
        let chosen = if picked.contains(&r) { j } else { r };
        picked.insert(chosen);
        pairs.push(chosen);
    }

    for index in pairs {
        let (src, tgt) = pair_from_index(index, spec.nodes, spec.self_loops);
        if next_f64(&mut rng) < spec.attack_probability {
            builder
                .attack(src, tgt)
                .expect("sampled pairs are distinct");
        } else {
            builder
                .support(src, tgt)
                .expect("sampled pairs are distinct");
        }
    }
    Ok(builder.build())
}

/// The Cycle(k) family: one argument `A` with weight 1 supports `B1..Bk`
/// (weight 0), every `Bi` supports every `Cj` (weight 0), and every `Ci`
/// attacks `A`. That is `2k + 1` arguments, `k^2 + k` supports and `k`
/// attacks; the strength of `A` oscillates with damped amplitude.
pub fn cycle_k(k: usize) -> Result<Bag, GenError> {
    if k == 0 {
        return Err(GenError::ZeroCycle);
    }
    let mut builder = BagBuilder::new();
    let a = builder.argument("A", 1.0).expect("valid name");
    let bs: Vec<_> = (1..=k)
        .map(|i| builder.argument(format!("B{i}"), 0.0).expect("valid name"))
        .collect();
    let cs: Vec<_> = (1..=k)
        .map(|i| builder.argument(format!("C{i}"), 0.0).expect("valid name"))
        .collect();
    for &b in &bs {
        builder.support(a, b).expect("distinct edges");
    }
    for &b in &bs {
        for &c in &cs {
            builder.support(b, c).expect("distinct edges");
        }
    }
    for &c in &cs {
        builder.attack(c, a).expect("distinct edges");
    }
    Ok(builder.build())
}

/// Serialized graph prefixed with the generator header comment.
pub fn render_bag_file(spec: &GenSpec, bag: &Bag) -> String {
    format!("{}\n{}", spec.header(), serialize_bag(bag))
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Per-file seed, a pure function of (root seed, size, trial index).
fn derived_seed(seed: u64, size: usize, index: usize) -> u64 {
    splitmix64(seed ^ splitmix64(size as u64 ^ splitmix64(index as u64)))
}

/// Shape of a generated benchmark directory tree.
#[derive(Debug, Clone)]
pub struct BenchmarkTree {
    pub root: PathBuf,
    pub sizes: Vec<usize>,
    pub files_written: usize,
}

/// Creates one subdirectory per size `base_size * i` for `i = 1..=increments`,
/// each holding `trials` files `bag_<index>.bag` with `floor(edge_ratio *
/// size)` edges, uniform weights and attack probability 0.5. File seeds
/// derive deterministically from `(seed, size, index)`.
pub fn generate_benchmark(
    dir: &Path,
    base_size: usize,
    increments: usize,
    trials: usize,
    edge_ratio: f64,
    seed: u64,
) -> Result<BenchmarkTree, GenError> {
    if base_size == 0 || increments == 0 || trials == 0 {
        return Err(GenError::EmptyBatch);
    }
    let io_err = |path: &Path, source: std::io::Error| GenError::Io {
        path: path.to_owned(),
        source,
    };
    let mut sizes = Vec::with_capacity(increments);
    let mut files_written = 0;
    for i in 1..=increments {
        let size = base_size * i;
        sizes.push(size);
        let size_dir = dir.join(size.to_string());
        fs::create_dir_all(&size_dir).map_err(|e| io_err(&size_dir, e))?;
        for index in 0..trials {
            let spec = GenSpec {
                edges: (edge_ratio * size as f64).floor() as usize,
                seed: derived_seed(seed, size, index),
                ..GenSpec::new(size, 0, 0)
            };
            let bag = random_bag(&spec)?;
            let path = size_dir.join(format!("bag_{index}.bag"));
            let mut file = fs::File::create(&path).map_err(|e| io_err(&path, e))?;
            file.write_all(render_bag_file(&spec, &bag).as_bytes())
                .map_err(|e| io_err(&path, e))?;
            files_written += 1;
        }
    }
    Ok(BenchmarkTree {
        root: dir.to_owned(),
        sizes,
        files_written,
    })
}
