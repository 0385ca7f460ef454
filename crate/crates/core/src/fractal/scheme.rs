//! The levelled pseudo-orbit scheme and its shadowing points.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::params::SchemeParams;
use crate::error::{Error, Result};
use crate::measures::{katok_separated_sets, Gamma, SeparatedSetCertificate, SeparatedSetParams};
use crate::report::InequalityCheck;
use crate::shadowing::{shadow, PseudoOrbit, Segment};
use crate::shift_space::word::word_text;
use crate::shift_space::{word_to_string, ShiftSpace, SymbolPoint, Word};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeMode {
    /// Separated block sets, each used `N_k` times.
    Full,
    /// One sampled block per level, `N_k = 1`.
    Light,
}

/// Repetition counts `N_k` in full mode.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", content = "values", rename_all = "snake_case")]
pub enum NkRule {
    /// `N_1 = 2`, `N_{k+1} = 2^{k+1} t_k`.
    Doubling,
    Explicit(Vec<usize>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BuildConfig {
    pub depth: usize,
    pub mode: SchemeMode,
    #[serde(default = "default_rule")]
    pub nk_rule: NkRule,
    /// `L` of the separated-set construction for `μ1`, `μ2` (full mode).
    #[serde(default = "default_floor")]
    pub block_floor: [usize; 2],
    /// Keep at most this many blocks per set.
    #[serde(default)]
    pub block_cap: Option<usize>,
    #[serde(default = "default_pool")]
    pub pool_size: usize,
    #[serde(default)]
    pub seed: u64,
    /// Light mode: `n_k = light_n0 * light_ratio^k` unless `light_lengths`
    /// is given.
    #[serde(default = "default_n0")]
    pub light_n0: usize,
    #[serde(default = "default_ratio")]
    pub light_ratio: usize,
    #[serde(default)]
    pub light_lengths: Option<Vec<usize>>,
    /// Largest `#T_K` a full-mode scheme may have.
    #[serde(default = "default_budget")]
    pub enumeration_budget: u64,
}

fn default_rule() -> NkRule {
    NkRule::Doubling
}
fn default_floor() -> [usize; 2] {
    [4, 4]
}
fn default_pool() -> usize {
    4096
}
fn default_n0() -> usize {
    4
}
fn default_ratio() -> usize {
    4
}
fn default_budget() -> u64 {
    1 << 20
}

impl BuildConfig {
    pub fn full(depth: usize, nk_rule: NkRule) -> Self {
        BuildConfig {
            depth,
            mode: SchemeMode::Full,
            nk_rule,
            block_floor: default_floor(),
            block_cap: None,
            pool_size: default_pool(),
            seed: 0,
            light_n0: default_n0(),
            light_ratio: default_ratio(),
            light_lengths: None,
            enumeration_budget: default_budget(),
        }
    }

    pub fn light(depth: usize, n0: usize) -> Self {
        BuildConfig { mode: SchemeMode::Light, light_n0: n0, ..Self::full(depth, NkRule::Explicit(vec![])) }
    }
}

/// One orbit block: `word = x[0, n-1]`, with `left = x[-w, -1]` and
/// `right = x[n, n+w]` so the jump to the next segment can be checked.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Block {
    #[serde(with = "word_text")]
    pub left: Word,
    #[serde(with = "word_text")]
    pub word: Word,
    #[serde(with = "word_text")]
    pub right: Word,
}

impl Block {
    fn of_point(x: &SymbolPoint, n: usize, w: usize) -> Self {
        Block {
            left: x.window(-(w as i64), -1),
            word: x.window(0, n as i64 - 1),
            right: x.window(n as i64, (n + w) as i64),
        }
    }

    /// An eventually periodic point carrying the block and its context.
    pub fn point(&self, space: &ShiftSpace) -> Result<SymbolPoint> {
        let ctx = [&self.left[..], &self.word, &self.right].concat();
        space.periodic_completion(&ctx, -(self.left.len() as i64))
    }
}

/// Summary of the separated set behind a level's blocks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockSetInfo {
    pub measure: usize,
    pub n: usize,
    pub found: usize,
    pub kept: usize,
    pub h_estimate: f64,
    pub certificate: SeparatedSetCertificate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Level {
    pub k: usize,
    /// `g(k)`: 1 for `μ1`, 2 for `μ2`.
    pub measure: usize,
    pub n: usize,
    pub repeats: usize,
    pub blocks: Vec<Block>,
    /// `y_k`, of length `N`, leading to level `k+1`.
    pub bridge: Block,
    /// Start `t_{k-1}` of the level.
    pub start: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FractalScheme {
    pub space: ShiftSpace,
    pub params: SchemeParams,
    pub mode: SchemeMode,
    pub seed: u64,
    pub levels: Vec<Level>,
    /// `t_1 .. t_K`.
    pub checkpoints: Vec<usize>,
    pub block_sets: Vec<BlockSetInfo>,
    /// `#S_k >= exp((h_{μ_k} - 3γ) n_k)`, in log form.
    pub count_checks: Vec<InequalityCheck>,
    /// Block-length conditions on `n_1`, `n_2`, and the ratio conditions on
    /// `n_{k+1}/N_k`, `t_k/N_{k+1}`.
    pub length_checks: Vec<InequalityCheck>,
    pub ratio_checks: Vec<InequalityCheck>,
}

impl FractalScheme {
    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    /// `t_k`, with `t_0 = 0`.
    pub fn t(&self, k: usize) -> usize {
        if k == 0 {
            0
        } else {
            self.checkpoints[k - 1]
        }
    }

    pub fn level(&self, k: usize) -> &Level {
        &self.levels[k - 1]
    }

    /// `log #T_k = Σ_{i<=k} N_i log #S_i`.
    pub fn log_point_count(&self, k: usize) -> f64 {
        self.levels[..k].iter().map(|l| l.repeats as f64 * (l.blocks.len() as f64).ln()).sum()
    }

    /// `#T_k`, if it fits in a `u64`.
    pub fn point_count(&self, k: usize) -> Option<u64> {
        self.levels[..k].iter().try_fold(1u64, |acc, l| {
            (l.blocks.len() as u64).checked_pow(l.repeats as u32).and_then(|p| acc.checked_mul(p))
        })
    }

    pub fn counts_hold(&self) -> bool {
        self.count_checks.iter().all(|c| c.holds)
    }

    /// The pseudo-orbit of levels `1..=choices.len()`, bridges included.
    pub fn pseudo_orbit(&self, choices: &[Vec<usize>]) -> Result<PseudoOrbit> {
        if choices.is_empty() || choices.len() > self.depth() {
            return Err(Error::InvalidScheme(format!(
                "choices cover {} levels, scheme depth is {}",
                choices.len(),
                self.depth()
            )));
        }
        let mut segments = Vec::new();
        for (level, slots) in self.levels.iter().zip(choices) {
            if slots.len() != level.repeats {
                return Err(Error::InvalidScheme(format!(
                    "level {} has {} slots, {} choices given",
                    level.k,
                    level.repeats,
                    slots.len()
                )));
            }
            for &c in slots {
                let block = level.blocks.get(c).ok_or_else(|| {
                    Error::InvalidScheme(format!("choice {c} out of range at level {} ({} blocks)", level.k, level.blocks.len()))
                })?;
                segments.push(Segment::new(block.point(&self.space)?, level.n));
            }
            segments.push(Segment::new(level.bridge.point(&self.space)?, self.params.mixing_gap));
        }
        PseudoOrbit::new(segments, 0, self.params.delta)
    }

    /// The choice vector with mixed-radix index `index` over levels `1..=k`
    /// (the last slot varies fastest).
    pub fn choices_at(&self, k: usize, mut index: u64) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = self.levels[..k].iter().map(|l| vec![0; l.repeats]).collect();
        for (li, level) in self.levels[..k].iter().enumerate().rev() {
            let base = level.blocks.len() as u64;
            for slot in out[li].iter_mut().rev() {
                *slot = (index % base) as usize;
                index /= base;
            }
        }
        out
    }
}

/// The shadowing point of the scheme's pseudo-orbit for the given choices.
pub fn construct_point(scheme: &FractalScheme, choices: &[Vec<usize>]) -> Result<SymbolPoint> {
    let po = scheme.pseudo_orbit(choices)?;
    let z = shadow(&po, &scheme.space)?;
    let how = z.provenance().unwrap_or("").to_string();
    let text: Vec<String> = choices
        .iter()
        .map(|c| c.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(","))
        .collect();
    Ok(z.with_provenance(format!("scheme point [{}]; {how}", text.join("|"))))
}

fn level_seed(seed: u64, k: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(k as u64);
    rng.gen()
}

/// Bridge block from `from` (a block of the ending level) to the first block
/// `to` of the next level: `right(from) · middle · left(to)`.
fn bridge_block(space: &ShiftSpace, from: &Block, to: &Block, w: usize, big_n: usize) -> Result<Block> {
    let mid_len = big_n
        .checked_sub(2 * w + 1)
        .ok_or_else(|| Error::InvalidScheme(format!("mixing gap {big_n} below 2w + 1 = {}", 2 * w + 1)))?;
    let to_head: Word = [&to.left[..], &to.word[..1]].concat();
    let middle = space.bridge(&from.right, &to_head, mid_len)?;
    let word: Word = [&from.right[..], &middle, &to.left[..]].concat();
    let n = from.word.len();
    let left = from.word[n.saturating_sub(w)..].to_vec();
    let right: Word = to.word.iter().chain(to.right.iter()).take(w + 1).copied().collect();
    Ok(Block { left, word, right })
}

/// Builds the scheme to depth `K`.
pub fn build_scheme(space: &ShiftSpace, params: &SchemeParams, config: &BuildConfig) -> Result<FractalScheme> {
    let w = params.junction_depth;
    let big_n = params.mixing_gap;
    let depth = config.depth;
    // Blocks for levels 1..=K+1; level K+1 only fixes the last bridge.
    let mut sets: Vec<(usize, usize, Vec<Block>)> = Vec::new();
    let mut block_sets = Vec::new();
    match config.mode {
        SchemeMode::Full => {
            for (i, mu) in [&params.mu1, &params.mu2].into_iter().enumerate() {
                let mut sp = SeparatedSetParams::new(
                    params.delta,
                    params.varsigma,
                    params.sep_radius,
                    config.block_floor[i],
                    config.pool_size,
                    config.seed.wrapping_add(i as u64),
                );
                sp.katok_rho = params.rho;
                let e = katok_separated_sets(space, mu, &Gamma::Whole, &sp)?;
                let found = e.points.len();
                let kept = config.block_cap.map_or(found, |c| c.min(found));
                let blocks: Vec<Block> = e.points[..kept].iter().map(|x| Block::of_point(x, e.n, w)).collect();
                block_sets.push(BlockSetInfo {
                    measure: i + 1,
                    n: e.n,
                    found,
                    kept,
                    h_estimate: e.h_estimate,
                    certificate: e.certificate.clone(),
                });
                sets.push((i + 1, e.n, blocks));
            }
        }
        SchemeMode::Light => {}
    }
    let level_blocks = |k: usize| -> Result<(usize, usize, Vec<Block>)> {
        let g = SchemeParams::measure_index(k);
        match config.mode {
            SchemeMode::Full => Ok(sets[g - 1].clone()),
            SchemeMode::Light => {
                let n = match &config.light_lengths {
                    Some(v) => *v.get(k - 1).or(v.last()).ok_or_else(|| Error::InvalidScheme("empty light_lengths".into()))?,
                    None => config.light_n0 * config.light_ratio.pow(k as u32),
                };
                let x = params.measure(k).sample_point(n + w + 2, level_seed(config.seed, k));
                Ok((g, n, vec![Block::of_point(&x, n, w)]))
            }
        }
    };

    let repeats_list: Option<&Vec<usize>> = match (&config.mode, &config.nk_rule) {
        (SchemeMode::Full, NkRule::Explicit(v)) => {
            if v.len() < depth {
                return Err(Error::InvalidScheme(format!("explicit N_k has {} entries, depth {depth}", v.len())));
            }
            Some(v)
        }
        _ => None,
    };

    let mut levels = Vec::with_capacity(depth);
    let mut checkpoints = Vec::with_capacity(depth);
    let mut t = 0usize;
    let mut next = if depth > 0 { Some(level_blocks(1)?) } else { None };
    for k in 1..=depth {
        let (g, n, blocks) = next.take().unwrap();
        if blocks.is_empty() {
            return Err(Error::EmptyPool(format!("level {k} has no blocks")));
        }
        let following = level_blocks(k + 1)?;
        let repeats = match config.mode {
            SchemeMode::Light => 1,
            SchemeMode::Full => match repeats_list {
                Some(v) => v[k - 1],
                None => (1usize << k) * t.max(1),
            },
        };
        if repeats == 0 {
            return Err(Error::InvalidScheme(format!("N_{k} = 0")));
        }
        let bridge = bridge_block(space, &blocks[0], &following.2[0], w, big_n)?;
        let start = t;
        t = t
            .checked_add(repeats.checked_mul(n).ok_or_else(|| Error::InvalidScheme("t_k overflow".into()))?)
            .and_then(|v| v.checked_add(big_n))
            .ok_or_else(|| Error::InvalidScheme("t_k overflow".into()))?;
        checkpoints.push(t);
        levels.push(Level { k, measure: g, n, repeats, blocks, bridge, start });
        next = Some(following);
    }

    let mut scheme = FractalScheme {
        space: space.clone(),
        params: params.clone(),
        mode: config.mode,
        seed: config.seed,
        levels,
        checkpoints,
        block_sets,
        count_checks: Vec::new(),
        length_checks: Vec::new(),
        ratio_checks: Vec::new(),
    };
    if config.mode == SchemeMode::Full {
        let log_count = scheme.log_point_count(depth);
        if log_count > (config.enumeration_budget as f64).ln() + 1e-9 {
            return Err(Error::Budget {
                what: "#T_K",
                required: log_count.exp().min(u64::MAX as f64) as u64,
                budget: config.enumeration_budget,
            });
        }
    }
    certify_lengths(&mut scheme);
    Ok(scheme)
}

fn certify_lengths(s: &mut FractalScheme) {
    let p = &s.params;
    let gamma = p.gamma;
    for level in &s.levels {
        let h = p.entropy(level.k);
        s.count_checks.push(InequalityCheck::new(
            format!("(h_μ{} - 3γ) n_{} <= log #S_{}", level.measure, level.k, level.k),
            (h - 3.0 * gamma) * level.n as f64,
            (level.blocks.len() as f64).ln(),
            1e-12,
        ));
    }
    if let Some(l1) = s.levels.first() {
        let n1 = l1.n as f64;
        s.length_checks.push(InequalityCheck::new(
            "(h* - 3γ) N < n_1 γ",
            (p.h_star - 3.0 * gamma) * p.mixing_gap as f64,
            n1 * gamma,
            0.0,
        ));
        s.length_checks.push(InequalityCheck::new("log 2 < n_1 ε", 2f64.ln(), n1 * p.epsilon, 0.0));
    }
    if let (Some(l2), Some(l)) = (s.levels.get(1), p.l) {
        s.length_checks.push(InequalityCheck::new("2 log l + l < n_2 ε", 2.0 * l.ln() + l, l2.n as f64 * p.epsilon, 0.0));
    }
    for c in &mut s.length_checks {
        c.holds = c.lhs < c.rhs;
    }
    // n_{k+1}/N_k and t_k/N_{k+1} strictly decreasing.
    let depth = s.levels.len();
    let r1: Vec<f64> = (1..depth).map(|k| s.levels[k].n as f64 / s.levels[k - 1].repeats as f64).collect();
    let r2: Vec<f64> = (1..depth).map(|k| s.checkpoints[k - 1] as f64 / s.levels[k].repeats as f64).collect();
    for (name, r) in [("n_{k+1}/N_k", &r1), ("t_k/N_{k+1}", &r2)] {
        for i in 1..r.len() {
            let mut c = InequalityCheck::new(format!("{name} at k = {} below k = {}", i + 1, i), r[i], r[i - 1], 0.0);
            c.holds = r[i] < r[i - 1];
            s.ratio_checks.push(c);
        }
    }
}

impl std::fmt::Display for Level {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "level {} (mu{}): n = {}, N = {}, {} blocks, bridge {}",
            self.k,
            self.measure,
            self.n,
            self.repeats,
            self.blocks.len(),
            word_to_string(&self.bridge.word)
        )
    }
}
