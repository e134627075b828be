//! Configuration, seeding and the verification suites driven by `slicecl`.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clifford::{CliffordElement, MAX_GENERATORS};
use crate::error::{Error, Result};
use crate::gauge::{
    diagonal_closed_form_check, gauge_properties_check, gauge_rho, growth_check_diagonal, growth_check_domain,
    sample_gauge_point, Gauge,
};
use crate::growth::{
    extremal_profile, growth_check_ball, hypothesis_status, profile_linearity, sample_ball_point, sharpness_check,
    vector_norm, verify_extremal, Family, GrowthCase,
};
use crate::report::{CheckRecord, GrowthRecord, HypothesisStatus, Record};
use crate::series::{
    convex_test_map, cr_residual, eval_stem, koebe_map, star_inverse, star_mul, ConvexVariant, RawStem, StemSeries,
    UnivariateSeries, DEFAULT_TRUNCATION,
};
use crate::slice::{
    embed, orbit_point_raw, sample_s, SamplingStrategy, SliceOrbit, SlicePoint,
};
use crate::slice_map::{
    check_regularity, eval, representation, representation_conjugate_pair, slice_holomorphy_residual, SliceMap,
    CONDITIONING_THRESHOLD, FD_STEP, FD_THRESHOLD,
};

/// Seed used when neither `--seed` nor the environment provides one.
pub const DEFAULT_SEED: u64 = 0x5eed_2024;
/// Environment variable overriding the default seed.
pub const SEED_ENV: &str = "SLICECL_SEED";
/// Fixed shard plan; results do not depend on the thread count.
pub const SHARDS: usize = 8;
/// Largest `n` the harness accepts.
pub const MAX_VARIABLES: usize = 16;

const SHARP_RADII: [f64; 9] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];
const DEFAULT_THETAS: [f64; 3] = [0.0, 0.7, FRAC_PI_2];

macro_rules! named_enum {
    ($(#[$meta:meta])* $name:ident { $($(#[$vmeta:meta])* $variant:ident => $text:literal),+ $(,)? }) => {
        $(#[$meta])*
        #[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub enum $name {
            $($(#[$vmeta])* $variant),+
        }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn name(self) -> &'static str {
                match self {
                    $($name::$variant => $text),+
                }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.name())
            }
        }

        impl Serialize for $name {
            fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                s.serialize_str(self.name())
            }
        }

        impl<'de> Deserialize<'de> for $name {
            fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
                let s = String::deserialize(d)?;
                s.parse().map_err(serde::de::Error::custom)
            }
        }

        impl FromStr for $name {
            type Err = Error;

            fn from_str(s: &str) -> Result<Self> {
                match s {
                    $($text => Ok($name::$variant),)+
                    _ => Err(Error::Config(format!(
                        "unknown {} '{}' (expected one of: {})",
                        stringify!($name).to_lowercase(),
                        s,
                        [$($text),+].join(", ")
                    ))),
                }
            }
        }
    };
}

named_enum!(
    /// A verification suite.
    Suite {
        Algebra => "algebra",
        Stem => "stem",
        Representation => "representation",
        Regularity => "regularity",
        Extremal => "extremal",
        GrowthBall => "growth-ball",
        GrowthDomain => "growth-domain",
        Gauge => "gauge",
        All => "all",
    }
);

named_enum!(
    /// Test map for the growth suites.
    MapKind {
        Koebe => "koebe",
        Cayley => "cayley",
        PaperExample => "paper-example",
    }
);

named_enum!(
    DomainKind {
        Ball => "ball",
        Polydisc => "polydisc",
    }
);

named_enum!(
    #[derive(Default)]
    Format {
        #[default]
        Json => "json",
        Csv => "csv",
    }
);

impl MapKind {
    pub fn family(self) -> Family {
        match self {
            MapKind::Koebe => Family::Starlike,
            MapKind::Cayley | MapKind::PaperExample => Family::Convex,
        }
    }

    /// Builds the map with `n` components on the slice `C_I`.
    pub fn build(self, theta: f64, i: &CliffordElement, truncation: usize, n: usize) -> Result<StemSeries> {
        match self {
            MapKind::Koebe => koebe_map(theta, i, truncation, n),
            MapKind::Cayley => convex_test_map(theta, i, truncation, n, ConvexVariant::Cayley),
            MapKind::PaperExample => convex_test_map(theta, i, truncation, n, ConvexVariant::PaperExample),
        }
    }

    /// Growth rows for the paper example are informational.
    fn asserted(self) -> bool {
        self != MapKind::PaperExample
    }

    /// One-variable profile of the θ = 0 map on the positive real axis.
    fn real_profile(self, r: f64) -> f64 {
        match self {
            MapKind::Koebe => r / (1.0 - r).powi(2),
            MapKind::Cayley => r / (1.0 - r),
            MapKind::PaperExample => r * (1.0 - r),
        }
    }
}

/// Everything a suite run depends on. `None` fields fall back to the
/// per-suite defaults.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub m: Option<usize>,
    pub n: Option<usize>,
    pub seed: u64,
    pub samples: Option<usize>,
    #[serde(rename = "N")]
    pub truncation: usize,
    pub r_max: f64,
    pub theta: Option<f64>,
    pub map: Option<MapKind>,
    pub domain: Option<DomainKind>,
    #[serde(skip)]
    pub format: Format,
    #[serde(skip)]
    pub out: Option<PathBuf>,
    /// Threshold overrides keyed by check name.
    pub tolerances: BTreeMap<String, f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            m: None,
            n: None,
            seed: DEFAULT_SEED,
            samples: None,
            truncation: DEFAULT_TRUNCATION,
            r_max: 0.9,
            theta: None,
            map: None,
            domain: None,
            format: Format::Json,
            out: None,
            tolerances: BTreeMap::new(),
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if let Some(m) = self.m {
            if m == 0 || m > MAX_GENERATORS {
                return Err(Error::Config(format!("m must be in 1..={MAX_GENERATORS}, got {m}")));
            }
        }
        if let Some(n) = self.n {
            if n == 0 || n > MAX_VARIABLES {
                return Err(Error::Config(format!("n must be in 1..={MAX_VARIABLES}, got {n}")));
            }
        }
        if self.samples == Some(0) {
            return Err(Error::Config("samples must be at least 1".into()));
        }
        if self.truncation == 0 {
            return Err(Error::Config("truncation must be at least 1".into()));
        }
        if !(self.r_max > 0.0 && self.r_max < 1.0) {
            return Err(Error::Config(format!("r_max must lie in (0, 1), got {}", self.r_max)));
        }
        if self.theta.is_some_and(|t| !t.is_finite()) {
            return Err(Error::Config("theta must be finite".into()));
        }
        if let Some((k, v)) = self.tolerances.iter().find(|(_, v)| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::Config(format!("tolerance for {k} must be a non-negative number, got {v}")));
        }
        Ok(())
    }

    fn m_or(&self, default: usize) -> usize {
        self.m.unwrap_or(default)
    }

    fn n_or(&self, default: usize) -> usize {
        self.n.unwrap_or(default)
    }

    fn samples_or(&self, default: usize) -> usize {
        self.samples.unwrap_or(default)
    }

    fn thetas(&self) -> Vec<f64> {
        match self.theta {
            Some(t) => vec![t],
            None => DEFAULT_THETAS.to_vec(),
        }
    }
}

/// One suite run: the config echo plus one record per check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub suite: String,
    pub config: RunConfig,
    pub shards: usize,
    pub pass: bool,
    pub records: Vec<Record>,
}

impl Report {
    pub fn exit_code(&self) -> i32 {
        if self.pass {
            0
        } else {
            1
        }
    }

    pub fn failures(&self) -> impl Iterator<Item = &Record> {
        self.records.iter().filter(|r| !r.ok())
    }
}

/// RNG for one shard of one sampling stream.
pub fn shard_rng(seed: u64, stream: u64, shard: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream * SHARDS as u64 + shard as u64);
    rng
}

fn shard_sizes(total: usize) -> Vec<usize> {
    (0..SHARDS)
        .map(|s| total / SHARDS + usize::from(s < total % SHARDS))
        .collect()
}

/// Runs `work(rng, shard, count)` on every shard in parallel, returning the
/// per-shard results in shard order.
fn sharded<T, F>(seed: u64, stream: u64, total: usize, work: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng, usize, usize) -> Result<T> + Sync,
{
    shard_sizes(total)
        .into_par_iter()
        .enumerate()
        .map(|(shard, count)| work(&mut shard_rng(seed, stream, shard), shard, count))
        .collect()
}

/// Alternates the two `S_m` samplers by sample index.
fn strategy_for(index: usize) -> SamplingStrategy {
    if index.is_multiple_of(2) {
        SamplingStrategy::Vector
    } else {
        SamplingStrategy::Rejection
    }
}

fn max_merge(parts: &[Vec<f64>]) -> Vec<f64> {
    let width = parts.first().map_or(0, Vec::len);
    (0..width)
        .map(|k| parts.iter().map(|p| p[k]).fold(0.0, f64::max))
        .collect()
}

fn uniform_element<R: Rng + ?Sized>(rng: &mut R, m: usize) -> CliffordElement {
    let c = (0..1usize << m).map(|_| rng.random_range(-1.0..1.0)).collect();
    CliffordElement::from_coeffs(m, c).expect("length 2^m")
}

fn vector_element<R: Rng + ?Sized>(rng: &mut R, m: usize, with_scalar: bool) -> CliffordElement {
    let mut c = vec![0.0; 1 << m];
    if with_scalar {
        c[0] = rng.random_range(-1.0..1.0);
    }
    for i in 0..m {
        c[1 << i] = rng.random_range(-1.0..1.0);
    }
    CliffordElement::from_coeffs(m, c).expect("length 2^m")
}

/// Point of `‖x‖ ≤ r` with uniformly drawn stem coordinates and slice `j`.
fn point_in_ball<R: Rng + ?Sized>(rng: &mut R, n: usize, r: f64, j: CliffordElement) -> Result<SlicePoint> {
    let m = j.m();
    let base = sample_ball_point(rng, m, n, r, SamplingStrategy::Vector)?;
    SlicePoint::new_raw(base.alpha, base.beta, j)
}

/// Random stem `Σ_{|k| ≤ degree} z^k a_k` with coefficients of size `1/(1 + |k|)`.
fn random_polynomial<R: Rng + ?Sized>(rng: &mut R, m: usize, n: usize, degree: u32) -> Result<StemSeries> {
    let mut f = StemSeries::new(m, n, degree as usize);
    let mut k = vec![0u32; n];
    loop {
        let total: u32 = k.iter().sum();
        if total <= degree {
            let a = (0..n)
                .map(|_| uniform_element(rng, m).scale(1.0 / (1.0 + f64::from(total))))
                .collect();
            f.add_term(k.clone(), a)?;
        }
        // odometer over {0..=degree}^n
        let mut t = 0;
        loop {
            if t == n {
                return Ok(f);
            }
            k[t] += 1;
            if k[t] <= degree {
                break;
            }
            k[t] = 0;
            t += 1;
        }
    }
}

fn slice_units(m: usize) -> Vec<(String, CliffordElement)> {
    let mut out = vec![("e1".to_string(), CliffordElement::generator(m, 1))];
    if m >= 2 {
        out.push(("e12".to_string(), CliffordElement::blade(m, &[1, 2]).expect("m >= 2")));
    }
    out
}

// ---------------------------------------------------------------- algebra

fn algebra_shard(rng: &mut ChaCha8Rng, m: usize, count: usize) -> Result<(Vec<f64>, usize)> {
    let one = CliffordElement::one(m);
    // assoc, anticommutation, anti-automorphism, involution, inverse
    let mut worst = vec![0.0; 5];
    let mut skipped = 0;
    for idx in 0..count {
        let a = uniform_element(rng, m);
        let b = uniform_element(rng, m);
        let c = uniform_element(rng, m);
        let assoc = (&(&(&a * &b) * &c) - &(&a * &(&b * &c))).max_abs();
        let u = vector_element(rng, m, false);
        let v = vector_element(rng, m, false);
        let anti = (&(&u * &v) + &(&v * &u)).add_scalar(2.0 * u.dot(&v)).max_abs();
        let conj = (&(&a * &b).conjugate() - &(&b.conjugate() * &a.conjugate())).max_abs();
        let invol = (&a.conjugate().conjugate() - &a).max_abs();
        // alternate between the cone fast path and the general solve
        let x = if idx % 2 == 0 { vector_element(rng, m, true) } else { a.clone() };
        let inverse = if x.left_mul_min_singular() < CONDITIONING_THRESHOLD {
            skipped += 1;
            0.0
        } else {
            let xi = x.invert(crate::clifford::DEFAULT_TOL)?;
            (&(&x * &xi) - &one).max_abs().max((&(&xi * &x) - &one).max_abs())
        };
        for (w, v) in worst.iter_mut().zip([assoc, anti, conj, invol, inverse]) {
            *w = f64::max(*w, v);
        }
    }
    Ok((worst, skipped))
}

fn exhaustive_anticommutation(m: usize) -> f64 {
    let mut worst = 0.0f64;
    for i in 1..=m {
        for j in 1..=m {
            let ei = CliffordElement::generator(m, i);
            let ej = CliffordElement::generator(m, j);
            let mut s = &(&ei * &ej) + &(&ej * &ei);
            if i == j {
                s = s.add_scalar(2.0);
            }
            worst = worst.max(s.max_abs());
        }
    }
    worst
}

fn suite_algebra(cfg: &RunConfig) -> Result<Vec<Record>> {
    let ms: Vec<usize> = match cfg.m {
        Some(m) => vec![m],
        None => (1..=5).collect(),
    };
    let total = cfg.samples_or(10_000);
    let mut out = Vec::new();
    for m in ms {
        let parts = sharded(cfg.seed, 100 + m as u64, total, |rng, _, count| algebra_shard(rng, m, count))?;
        let worst = max_merge(&parts.iter().map(|p| p.0.clone()).collect::<Vec<_>>());
        let skipped: usize = parts.iter().map(|p| p.1).sum();
        let names = [
            "algebra-associativity",
            "algebra-anticommutation",
            "algebra-conjugation-anti-automorphism",
            "algebra-conjugation-involution",
            "algebra-inverse",
        ];
        for (k, name) in names.iter().enumerate() {
            let mut err = worst[k];
            let mut samples = total;
            if k == 1 {
                err = err.max(exhaustive_anticommutation(m));
            }
            if k == 4 {
                samples -= skipped;
            }
            let mut rec = CheckRecord::new(*name, samples, err, 1e-10).param("m", m);
            if k == 4 {
                rec = rec.param("skipped_ill_conditioned", skipped);
            }
            out.push(rec.into());
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------- stem

fn parity_error<S: crate::series::Stem>(f: &S, alpha: &[f64], beta: &[f64]) -> f64 {
    let (f1, f2) = eval_stem(f, alpha, beta);
    let neg: Vec<f64> = beta.iter().map(|b| -b).collect();
    let (g1, g2) = eval_stem(f, alpha, &neg);
    f1.iter()
        .zip(&g1)
        .map(|(a, b)| (a - b).max_abs())
        .chain(f2.iter().zip(&g2).map(|(a, b)| (a + b).max_abs()))
        .fold(0.0, f64::max)
}

/// Largest coefficient of `f * f^{-*} - 1` through `order`.
fn star_inverse_residual(f: &UnivariateSeries, order: usize) -> Result<f64> {
    let g = star_inverse(f, order)?;
    let prod = star_mul(f, &g)?;
    Ok((0..=order)
        .map(|k| {
            let c = prod.coeff(k);
            if k == 0 { c.add_scalar(-1.0) } else { c }.max_abs()
        })
        .fold(0.0, f64::max))
}

/// `1 - x q` raised to the `*`-power `power`, `q = e^{Iθ}`.
fn rotation_binomial(i: &CliffordElement, theta: f64, power: usize) -> Result<UnivariateSeries> {
    let m = i.m();
    let q = CliffordElement::exp_unit(i, theta);
    let base = UnivariateSeries::new(m, vec![CliffordElement::one(m), -q])?;
    let mut out = UnivariateSeries::one(m);
    for _ in 0..power {
        out = star_mul(&out, &base)?;
    }
    Ok(out)
}

fn suite_stem(cfg: &RunConfig) -> Result<Vec<Record>> {
    let m = cfg.m_or(3);
    let n = cfg.n_or(2);
    let total = cfg.samples_or(1_000);
    let order = cfg.truncation;
    let koebe = koebe_map(0.7, &CliffordElement::generator(m, 1), cfg.truncation, n)?;
    let parts = sharded(cfg.seed, 200, total, |rng, _, count| {
        let mut worst = vec![0.0; 3];
        for _ in 0..count {
            let poly = random_polynomial(rng, m, n, 5)?;
            let j = sample_s(rng, m, SamplingStrategy::Vector)?;
            let p = point_in_ball(rng, n, cfg.r_max, j.clone())?;
            let parity = parity_error(&poly, &p.alpha, &p.beta).max(parity_error(&koebe, &p.alpha, &p.beta));
            // well-definedness: α + β(-J) and α + (-β)J are the same point
            let fp = SliceMap::new(poly.clone());
            let neg_beta: Vec<f64> = p.beta.iter().map(|b| -b).collect();
            let lhs = eval(&fp, &SlicePoint::new_raw(p.alpha.clone(), p.beta.clone(), -&j)?);
            let rhs = eval(&fp, &SlicePoint::new_raw(p.alpha.clone(), neg_beta, j.clone())?);
            let welldef = lhs.iter().zip(&rhs).map(|(a, b)| (a - b).max_abs()).fold(0.0, f64::max);
            let unit = point_in_ball(rng, n, 1.0, j.clone())?;
            let near = point_in_ball(rng, n, 0.3, j)?;
            let cr = cr_residual(&poly, &unit.alpha, &unit.beta, FD_STEP)
                .max(cr_residual(&koebe, &near.alpha, &near.beta, FD_STEP));
            for (w, v) in worst.iter_mut().zip([parity, welldef, cr]) {
                *w = f64::max(*w, v);
            }
        }
        Ok(worst)
    })?;
    let worst = max_merge(&parts);
    let inverse_cases = (total / 10).max(1);
    let inv_parts = sharded(cfg.seed, 201, inverse_cases, |rng, _, count| {
        let mut worst = 0.0f64;
        for idx in 0..count {
            let i = sample_s(rng, m, strategy_for(idx))?;
            let theta = rng.random_range(0.0..std::f64::consts::TAU);
            let f = match idx % 3 {
                0 => rotation_binomial(&i, theta, 1)?,
                1 => rotation_binomial(&i, theta, 2)?,
                _ => {
                    // a_0 = 1 with a small tail keeps the inverse bounded
                    let mut c = vec![CliffordElement::one(m)];
                    for _ in 0..3 {
                        let a = uniform_element(rng, m);
                        let s = 0.1 / a.modulus().max(1e-300);
                        c.push(a.scale(s));
                    }
                    UnivariateSeries::new(m, c)?
                }
            };
            worst = worst.max(star_inverse_residual(&f, order)?);
        }
        Ok(vec![worst])
    })?;
    Ok(vec![
        CheckRecord::new("stem-even-odd", total, worst[0], 1e-12)
            .param("m", m)
            .param("n", n)
            .into(),
        CheckRecord::new("stem-well-defined", total, worst[1], 1e-12)
            .param("m", m)
            .param("n", n)
            .into(),
        CheckRecord::new("stem-cauchy-riemann", total, worst[2], 1e-8)
            .param("m", m)
            .param("n", n)
            .param("step", FD_STEP)
            .into(),
        CheckRecord::new("stem-star-inverse", inverse_cases, max_merge(&inv_parts)[0], 1e-10)
            .param("m", m)
            .param("order", order)
            .into(),
    ])
}

// ---------------------------------------------------------------- representation

fn suite_representation(cfg: &RunConfig) -> Result<Vec<Record>> {
    let m = cfg.m_or(3);
    let n = cfg.n_or(2);
    let total = cfg.samples_or(1_000);
    let parts = sharded(cfg.seed, 300, total, |rng, _, count| {
        let mut worst = vec![0.0; 2];
        let mut skipped = 0usize;
        let mut done = 0;
        let mut draws = 0usize;
        while done < count {
            draws += 1;
            if draws > 100 * count.max(1) {
                return Err(Error::Representation("too many ill-conditioned (J, K) draws".into()));
            }
            let f = SliceMap::new(random_polynomial(rng, m, n, 5)?);
            let alpha: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let beta: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let o = SliceOrbit::new(alpha, beta)?;
            let j = sample_s(rng, m, strategy_for(draws))?;
            let k = sample_s(rng, m, strategy_for(draws + 1))?;
            let i = sample_s(rng, m, strategy_for(draws / 2))?;
            let rebuilt = match representation(&f, &o, &j, &k, &i) {
                Ok(v) => v,
                Err(Error::Representation(_)) => {
                    skipped += 1;
                    continue;
                }
                Err(e) => return Err(e),
            };
            let direct = eval(&f, &orbit_point_raw(&o, &i)?);
            let pair = representation_conjugate_pair(&f, &o, &j, &i)?;
            let diff = |a: &[CliffordElement]| {
                a.iter()
                    .zip(&direct)
                    .map(|(x, y)| (x - y).max_abs())
                    .fold(0.0, f64::max)
            };
            worst[0] = f64::max(worst[0], diff(&rebuilt));
            worst[1] = f64::max(worst[1], diff(&pair));
            done += 1;
        }
        Ok((worst, skipped))
    })?;
    let worst = max_merge(&parts.iter().map(|p| p.0.clone()).collect::<Vec<_>>());
    let skipped: usize = parts.iter().map(|p| p.1).sum();
    Ok(vec![
        CheckRecord::new("representation-formula", total, worst[0], 1e-10)
            .param("m", m)
            .param("n", n)
            .param("degree", 5)
            .param("conditioning_threshold", CONDITIONING_THRESHOLD)
            .param("skipped_ill_conditioned", skipped)
            .into(),
        CheckRecord::new("representation-conjugate-pair", total, worst[1], 1e-10)
            .param("m", m)
            .param("n", n)
            .param("degree", 5)
            .into(),
    ])
}

// ---------------------------------------------------------------- regularity

fn suite_regularity(cfg: &RunConfig) -> Result<Vec<Record>> {
    let m = cfg.m_or(3);
    let n = cfg.n_or(2);
    let total = cfg.samples_or(1_000);
    let e1 = CliffordElement::generator(m, 1);
    let theta = cfg.theta.unwrap_or(0.7);
    // finite differences of the full series lose accuracy near the boundary
    let series_radius = cfg.r_max.min(0.3);
    let maps: Vec<(&str, StemSeries, f64)> = vec![
        ("koebe", koebe_map(theta, &e1, cfg.truncation, n)?, series_radius),
        (
            "cayley",
            convex_test_map(theta, &e1, cfg.truncation, n, ConvexVariant::Cayley)?,
            series_radius,
        ),
    ];
    let mut out: Vec<Record> = Vec::new();
    for (stream, (name, stem, radius)) in maps.into_iter().enumerate() {
        let f = SliceMap::new(stem);
        let parts = sharded(cfg.seed, 400 + stream as u64, total, |rng, _, count| {
            let pts = (0..count)
                .map(|idx| {
                    let j = sample_s(rng, m, strategy_for(idx))?;
                    point_in_ball(rng, n, radius, j)
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(check_regularity(&f, &pts))
        })?;
        let mut rec = parts[0].clone();
        parts[1..].iter().for_each(|p| rec.merge(p));
        rec.check = format!("regularity-{name}");
        out.push(rec.param("radius", radius).param("theta", theta).into());
    }
    let parts = sharded(cfg.seed, 410, total, |rng, _, count| {
        let mut worst = 0.0f64;
        for idx in 0..count {
            let f = SliceMap::new(random_polynomial(rng, m, n, 5)?);
            let j = sample_s(rng, m, strategy_for(idx))?;
            let p = point_in_ball(rng, n, 1.0, j)?;
            worst = worst.max(slice_holomorphy_residual(&f, &p, FD_STEP));
        }
        Ok(vec![worst])
    })?;
    out.push(
        CheckRecord::new("regularity-polynomial", total, max_merge(&parts)[0], FD_THRESHOLD)
            .param("m", m)
            .param("n", n)
            .param("degree", 5)
            .param("step", FD_STEP)
            .into(),
    );
    // negative control: x ↦ Re x is slice but not slice regular
    let control = SliceMap::new(RawStem::real_part(m, n));
    let mut rng = shard_rng(cfg.seed, 411, 0);
    let mut missed = 0usize;
    let probes = 32;
    for idx in 0..probes {
        let j = sample_s(&mut rng, m, strategy_for(idx))?;
        let p = point_in_ball(&mut rng, n, 0.9, j)?;
        if slice_holomorphy_residual(&control, &p, FD_STEP) <= FD_THRESHOLD {
            missed += 1;
        }
    }
    out.push(
        CheckRecord::new("regularity-detects-non-regular", probes, missed as f64, 0.0)
            .param("map", "real-part")
            .into(),
    );
    Ok(out)
}

// ---------------------------------------------------------------- extremal

fn suite_extremal(cfg: &RunConfig) -> Result<Vec<Record>> {
    let ms: Vec<usize> = cfg.m.map_or(vec![2, 3], |m| vec![m]);
    let ns: Vec<usize> = cfg.n.map_or(vec![1, 2], |n| vec![n]);
    let per_orbit = cfg.samples_or(1_000);
    let theta = cfg.theta.unwrap_or(0.7);
    let orbits = 4;
    let mut out: Vec<Record> = Vec::new();
    let mut stream = 500u64;
    for &m in &ms {
        if m < 2 {
            return Err(Error::Config("the extremal suite needs m >= 2".into()));
        }
        for &n in &ns {
            for (iname, i) in slice_units(m) {
                for map in ["identity", "koebe"] {
                    let stem = match map {
                        "identity" => StemSeries::identity(m, n),
                        _ => koebe_map(theta, &i, cfg.truncation, n)?,
                    };
                    let f = SliceMap::new(stem);
                    stream += 1;
                    let parts = sharded(cfg.seed, stream, orbits * per_orbit, |rng, _, count| {
                        // linearity, endpoint excess, endpoint consistency
                        let mut worst = vec![0.0; 3];
                        let mut left = count;
                        while left > 0 {
                            let batch = left.min(per_orbit);
                            left -= batch;
                            let base = sample_ball_point(rng, m, n, cfg.r_max, SamplingStrategy::Vector)?;
                            let o = SliceOrbit::of_point(&base);
                            worst[0] = f64::max(worst[0], profile_linearity(&f, &o, &i, 11)?);
                            let js = (0..batch)
                                .map(|idx| sample_s(rng, m, strategy_for(idx)))
                                .collect::<Result<Vec<_>>>()?;
                            worst[1] = f64::max(worst[1], verify_extremal(&f, &o, &i, &js)?.max_error);
                            let prof = extremal_profile(&f, &o, &i)?;
                            for (u, s) in [(1.0, &i), (-1.0, &-&i)] {
                                let direct = vector_norm(&eval(&f, &orbit_point_raw(&o, s)?));
                                worst[2] = f64::max(worst[2], (prof.g(u).max(0.0).sqrt() - direct).abs());
                            }
                        }
                        Ok(worst)
                    })?;
                    let worst = max_merge(&parts);
                    let total = orbits * per_orbit;
                    let tag = |rec: CheckRecord| -> Record {
                        rec.param("map", map)
                            .param("m", m)
                            .param("n", n)
                            .param("I", iname.as_str())
                            .param("theta", if map == "koebe" { theta } else { 0.0 })
                            .into()
                    };
                    out.push(tag(CheckRecord::new("extremal-profile-linearity", orbits * SHARDS, worst[0], 1e-9)
                        .param("u_values", 11)));
                    out.push(tag(CheckRecord::new("extremal-endpoints", total, worst[1], 1e-9)));
                    out.push(tag(CheckRecord::new("extremal-profile-endpoints", orbits * SHARDS, worst[2], 1e-10)));
                }
            }
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------- growth (ball)

fn growth_maps(cfg: &RunConfig) -> Vec<MapKind> {
    match cfg.map {
        Some(k) => vec![k],
        None => MapKind::ALL.to_vec(),
    }
}

fn growth_points(cfg: &RunConfig, stream: u64, m: usize, n: usize, total: usize) -> Result<Vec<SlicePoint>> {
    let parts = sharded(cfg.seed, stream, total, |rng, _, count| {
        (0..count)
            .map(|idx| sample_ball_point(rng, m, n, cfg.r_max, strategy_for(idx)))
            .collect::<Result<Vec<_>>>()
    })?;
    Ok(parts.into_iter().flatten().collect())
}

/// Stream for the sampled points of one growth case; the ball suites share it
/// so their rows are computed on identical points.
fn growth_stream(base: u64, map: MapKind, theta_idx: usize, unit_idx: usize) -> u64 {
    let map_idx = MapKind::ALL.iter().position(|k| *k == map).unwrap_or(0) as u64;
    base + 100 * map_idx + 10 * theta_idx as u64 + unit_idx as u64
}

fn run_growth_ball(f: &SliceMap<StemSeries>, case: &GrowthCase<'_>, points: &[SlicePoint]) -> GrowthRecord {
    let hyp_pts = &points[..points.len().min(1_000)];
    let hyp = hypothesis_status(f, case.map_i, case.family, hyp_pts);
    // evaluate in shard-sized chunks and fold in order
    let chunk = points.len().div_ceil(SHARDS).max(1);
    let parts: Vec<GrowthRecord> = points
        .par_chunks(chunk)
        .map(|pts| growth_check_ball(f, case, pts, hyp))
        .collect();
    let mut rec = growth_check_ball(f, case, &[], hyp);
    for p in &parts {
        rec.samples += p.samples;
        rec.max_violation_lower = rec.max_violation_lower.max(p.max_violation_lower);
        rec.max_violation_upper = rec.max_violation_upper.max(p.max_violation_upper);
    }
    rec.pass = rec.within_slack();
    rec
}

fn suite_growth_ball(cfg: &RunConfig) -> Result<Vec<Record>> {
    let m = cfg.m_or(3);
    let n = cfg.n_or(2);
    let total = cfg.samples_or(10_000);
    let mut out: Vec<Record> = Vec::new();
    for map in growth_maps(cfg) {
        for (ti, theta) in cfg.thetas().into_iter().enumerate() {
            for (ii, (iname, i)) in slice_units(m).into_iter().enumerate() {
                let f = SliceMap::new(map.build(theta, &i, cfg.truncation, n)?);
                let points = growth_points(cfg, growth_stream(1000, map, ti, ii), m, n, total)?;
                let case = GrowthCase {
                    map_name: map.name(),
                    map_i: &i,
                    family: map.family(),
                    theta,
                    r_max: cfg.r_max,
                };
                let mut rec = run_growth_ball(&f, &case, &points);
                rec.asserted &= map.asserted();
                out.push(rec.into());
                if theta == 0.0 && iname == "e1" {
                    let mut sharp = sharpness_check(&f, map.family(), &SHARP_RADII)
                        .param("map", map.name())
                        .param("m", m)
                        .param("n", n);
                    if !map.asserted() {
                        sharp = sharp.report_only();
                    }
                    out.push(sharp.into());
                }
            }
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------- growth (domain)

fn growth_domain_ball(cfg: &RunConfig, map: MapKind) -> Result<Vec<Record>> {
    let m = cfg.m_or(3);
    let n = cfg.n_or(2);
    let total = cfg.samples_or(10_000);
    let gauge = Gauge::ball(m, n);
    let mut out: Vec<Record> = Vec::new();
    for (ti, theta) in cfg.thetas().into_iter().enumerate() {
        for (ii, (_, i)) in slice_units(m).into_iter().enumerate() {
            let f = SliceMap::new(map.build(theta, &i, cfg.truncation, n)?);
            let points = growth_points(cfg, growth_stream(1000, map, ti, ii), m, n, total)?;
            let case = GrowthCase {
                map_name: map.name(),
                map_i: &i,
                family: map.family(),
                theta,
                r_max: cfg.r_max,
            };
            let ball = run_growth_ball(&f, &case, &points);
            let mut recs = growth_check_domain(&f, &gauge, &case, &points, ball.hypothesis_status, 1e-12)?;
            let mut gap = 0.0f64;
            for rec in &mut recs {
                rec.asserted &= map.asserted();
                gap = gap
                    .max((rec.max_violation_lower - ball.max_violation_lower).abs())
                    .max((rec.max_violation_upper - ball.max_violation_upper).abs());
            }
            out.extend(recs.into_iter().map(Record::from));
            let mut agree = CheckRecord::new("growth-domain-ball-matches-ball", total, gap, 1e-12)
                .param("map", map.name())
                .param("theta", theta)
                .param("I", i.to_string());
            if !map.asserted() {
                agree = agree.report_only();
            }
            out.push(agree.into());
        }
    }
    Ok(out)
}

fn growth_domain_polydisc(cfg: &RunConfig, map: MapKind) -> Result<Vec<Record>> {
    let m = cfg.m_or(3);
    let n = cfg.n_or(2);
    let total = cfg.samples_or(10_000);
    let gauge = Gauge::polydisc(m, n);
    let mut out: Vec<Record> = Vec::new();
    for (ti, theta) in cfg.thetas().into_iter().enumerate() {
        for (ii, (_, i)) in slice_units(m).into_iter().enumerate() {
            let f = SliceMap::new(map.build(theta, &i, cfg.truncation, n)?);
            let stream = growth_stream(2000, map, ti, ii);
            let parts = sharded(cfg.seed, stream, total, |rng, _, count| {
                (0..count)
                    .map(|idx| sample_gauge_point(&gauge, rng, cfg.r_max, strategy_for(idx), 1e-12))
                    .collect::<Result<Vec<_>>>()
            })?;
            let points: Vec<SlicePoint> = parts.into_iter().flatten().collect();
            let case = GrowthCase {
                map_name: map.name(),
                map_i: &i,
                family: map.family(),
                theta,
                r_max: cfg.r_max,
            };
            let recs = growth_check_domain(&f, &gauge, &case, &points, HypothesisStatus::NotChecked, 1e-12)?;
            out.extend(recs.into_iter().map(Record::from));
        }
    }
    // real diagonal (r, …, r) at θ = 0, where ρ = r and the values are closed form
    if cfg.theta.unwrap_or(0.0) == 0.0 && map.asserted() {
        let e1 = CliffordElement::generator(m, 1);
        let mut dims = vec![1, n];
        dims.dedup();
        for d in dims {
            let f = SliceMap::new(map.build(0.0, &e1, cfg.truncation, d)?);
            let g = Gauge::polydisc(m, d);
            let case = GrowthCase {
                map_name: map.name(),
                map_i: &e1,
                family: map.family(),
                theta: 0.0,
                r_max: 0.9,
            };
            for rec in growth_check_diagonal(&f, &g, &case, &SHARP_RADII, 1e-12)? {
                out.push(rec.into());
            }
            out.push(
                diagonal_closed_form_check(&f, &SHARP_RADII, |r| map.real_profile(r))
                    .param("map", map.name())
                    .param("n", d)
                    .into(),
            );
        }
    }
    Ok(out)
}

fn suite_growth_domain(cfg: &RunConfig) -> Result<Vec<Record>> {
    let domains: Vec<DomainKind> = cfg.domain.map_or(DomainKind::ALL.to_vec(), |d| vec![d]);
    let maps: Vec<MapKind> = match cfg.map {
        Some(k) => vec![k],
        None => vec![MapKind::Koebe, MapKind::Cayley],
    };
    let mut out = Vec::new();
    for domain in domains {
        for &map in &maps {
            match domain {
                DomainKind::Ball => out.extend(growth_domain_ball(cfg, map)?),
                DomainKind::Polydisc => out.extend(growth_domain_polydisc(cfg, map)?),
            }
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------- gauge

fn ball_membership(p: &SlicePoint) -> bool {
    vector_norm(&embed(p)) < 1.0
}

fn polydisc_membership(p: &SlicePoint) -> bool {
    embed(p).iter().all(|x| x.modulus() < 1.0)
}

fn suite_gauge(cfg: &RunConfig) -> Result<Vec<Record>> {
    let m = cfg.m_or(3);
    let n = cfg.n_or(2);
    let total = cfg.samples_or(1_000);
    let mut out: Vec<Record> = Vec::new();
    let closed = [Gauge::ball(m, n), Gauge::polydisc(m, n)];
    let oracles = [
        Gauge::oracle(m, n, ball_membership),
        Gauge::oracle(m, n, polydisc_membership),
    ];
    for (k, (g, oracle)) in closed.iter().zip(&oracles).enumerate() {
        let stream = 800 + 10 * k as u64;
        let parts = sharded(cfg.seed, stream, total, |rng, _, count| {
            let pts = (0..count)
                .map(|idx| sample_gauge_point(g, rng, 2.0, strategy_for(idx), 1e-12))
                .collect::<Result<Vec<_>>>()?;
            let props = gauge_properties_check(g, &pts, rng, 100, 1e-12, 1e-12)?;
            let mut agree = 0.0f64;
            for p in &pts {
                agree = agree.max((gauge_rho(oracle, p, 1e-12)? - gauge_rho(g, p, 1e-12)?).abs());
            }
            // the bisection gauge on a smaller budget
            let few = &pts[..pts.len().min(count / 10 + 1)];
            let oracle_props = gauge_properties_check(oracle, few, rng, 10, 1e-12, 1e-8)?;
            Ok((props, agree, oracle_props))
        })?;
        let mut props = parts[0].0.clone();
        let mut oracle_props = parts[0].2.clone();
        for p in &parts[1..] {
            props.iter_mut().zip(&p.0).for_each(|(a, b)| a.merge(b));
            oracle_props.iter_mut().zip(&p.2).for_each(|(a, b)| a.merge(b));
        }
        let tag = |rec: CheckRecord| -> Record { rec.param("m", m).param("n", n).into() };
        out.extend(props.into_iter().map(tag));
        let agree = parts.iter().map(|p| p.1).fold(0.0, f64::max);
        out.push(tag(
            CheckRecord::new("gauge-bisection-matches-closed-form", total, agree, 1e-8).param("gauge", g.name()),
        ));
        out.extend(
            oracle_props
                .into_iter()
                .map(|mut r| {
                    r.check = format!("{}-bisection", r.check);
                    r.param("wraps", g.name())
                })
                .map(tag),
        );
    }
    Ok(out)
}

// ---------------------------------------------------------------- driver

fn suite_records(suite: Suite, cfg: &RunConfig) -> Result<Vec<Record>> {
    match suite {
        Suite::Algebra => suite_algebra(cfg),
        Suite::Stem => suite_stem(cfg),
        Suite::Representation => suite_representation(cfg),
        Suite::Regularity => suite_regularity(cfg),
        Suite::Extremal => suite_extremal(cfg),
        Suite::GrowthBall => suite_growth_ball(cfg),
        Suite::GrowthDomain => suite_growth_domain(cfg),
        Suite::Gauge => suite_gauge(cfg),
        Suite::All => {
            let mut out = Vec::new();
            for s in Suite::ALL.iter().filter(|s| **s != Suite::All) {
                out.extend(suite_records(*s, cfg)?);
            }
            Ok(out)
        }
    }
}

fn apply_tolerances(records: &mut [Record], tolerances: &BTreeMap<String, f64>) {
    for r in records {
        if let Record::Check(c) = r {
            if let Some(t) = tolerances.get(&c.check) {
                c.threshold = *t;
                c.pass = c.max_error <= *t;
            }
        }
    }
}

/// Runs one suite and assembles its report. Does not write anything.
pub fn run_suite(suite: Suite, cfg: &RunConfig) -> Result<Report> {
    cfg.validate()?;
    let mut records = suite_records(suite, cfg)?;
    apply_tolerances(&mut records, &cfg.tolerances);
    Ok(Report {
        suite: suite.name().to_string(),
        config: cfg.clone(),
        shards: SHARDS,
        pass: records.iter().all(Record::ok),
        records,
    })
}

/// `{:.16e}`: 17 significant digits, locale independent.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

const CSV_HEADER: [&str; 20] = [
    "check",
    "kind",
    "family",
    "map",
    "I",
    "m",
    "n",
    "theta",
    "r_max",
    "samples",
    "N",
    "hypothesis_status",
    "max_error",
    "threshold",
    "max_violation_lower",
    "max_violation_upper",
    "tail_bound",
    "pass",
    "asserted",
    "params",
];

fn csv_row(r: &Record) -> Vec<String> {
    match r {
        Record::Check(c) => {
            let mut row = vec![String::new(); CSV_HEADER.len()];
            row[0] = c.check.clone();
            row[1] = "check".into();
            row[9] = c.samples.to_string();
            row[12] = format_float(c.max_error);
            row[13] = format_float(c.threshold);
            row[17] = c.pass.to_string();
            row[18] = c.asserted.to_string();
            row[19] = serde_json::to_string(&c.params).expect("params serialize");
            row
        }
        Record::Growth(g) => vec![
            g.check.clone(),
            "growth".into(),
            g.family.clone(),
            g.map.clone(),
            g.unit.clone(),
            g.m.to_string(),
            g.n.to_string(),
            format_float(g.theta),
            format_float(g.r_max),
            g.samples.to_string(),
            g.truncation.to_string(),
            serde_json::to_value(g.hypothesis_status)
                .ok()
                .and_then(|v| v.as_str().map(str::to_string))
                .unwrap_or_default(),
            String::new(),
            String::new(),
            format_float(g.max_violation_lower),
            format_float(g.max_violation_upper),
            format_float(g.tail_bound),
            g.pass.to_string(),
            g.asserted.to_string(),
            String::new(),
        ],
    }
}

fn io_err(e: impl fmt::Display) -> Error {
    Error::Io(e.to_string())
}

/// Serializes a report in the requested format.
pub fn render_report(report: &Report, format: Format) -> Result<Vec<u8>> {
    match format {
        Format::Json => {
            let mut buf = serde_json::to_vec_pretty(report).map_err(io_err)?;
            buf.push(b'\n');
            Ok(buf)
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(CSV_HEADER).map_err(io_err)?;
            for r in &report.records {
                w.write_record(csv_row(r)).map_err(io_err)?;
            }
            w.into_inner().map_err(io_err)
        }
    }
}

/// Writes to `out`, or to stdout when `out` is `None`.
pub fn write_output(bytes: &[u8], out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, bytes)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(bytes)?;
            stdout.flush()?;
        }
    }
    Ok(())
}

/// One row of the growth envelope.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EnvelopeRow {
    pub r: f64,
    pub lower: f64,
    pub norm_at_minus_r: f64,
    pub norm_at_r: f64,
    pub upper: f64,
}

/// `(r, lower, ‖f(-r)‖, ‖f(r)‖, upper)` along the first real axis.
pub fn emit_envelope(map: MapKind, theta: f64, radii: &[f64], cfg: &RunConfig) -> Result<Vec<EnvelopeRow>> {
    cfg.validate()?;
    if let Some(r) = radii.iter().find(|r| !(**r >= 0.0 && **r < 1.0)) {
        return Err(Error::Config(format!("envelope radii must lie in [0, 1), got {r}")));
    }
    let m = cfg.m_or(3);
    let n = cfg.n_or(1);
    let e1 = CliffordElement::generator(m, 1);
    let f = SliceMap::new(map.build(theta, &e1, cfg.truncation, n)?);
    let axis = |x: f64| {
        let mut a = vec![0.0; n];
        a[0] = x;
        SlicePoint::real(m, a)
    };
    Ok(radii
        .iter()
        .map(|&r| {
            let (lower, upper) = map.family().bounds(r);
            EnvelopeRow {
                r,
                lower,
                norm_at_minus_r: vector_norm(&eval(&f, &axis(-r))),
                norm_at_r: vector_norm(&eval(&f, &axis(r))),
                upper,
            }
        })
        .collect())
}

pub fn render_envelope(rows: &[EnvelopeRow]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["r", "lower", "norm_f_minus_r", "norm_f_r", "upper"])
        .map_err(io_err)?;
    for row in rows {
        w.write_record(
            [row.r, row.lower, row.norm_at_minus_r, row.norm_at_r, row.upper].map(format_float),
        )
        .map_err(io_err)?;
    }
    w.into_inner().map_err(io_err)
}

/// Parses `a,b,c` or `start:stop:count` (inclusive, evenly spaced).
pub fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let bad = || Error::Config(format!("cannot parse r grid '{s}'"));
    if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        let [a, b, c] = parts.as_slice() else {
            return Err(bad());
        };
        let start: f64 = a.trim().parse().map_err(|_| bad())?;
        let stop: f64 = b.trim().parse().map_err(|_| bad())?;
        let count: usize = c.trim().parse().map_err(|_| bad())?;
        return match count {
            0 => Err(bad()),
            1 => Ok(vec![start]),
            _ => Ok((0..count)
                .map(|k| start + (stop - start) * k as f64 / (count - 1) as f64)
                .collect()),
        };
    }
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| bad()))
        .collect()
}

/// Parses a `check=value` tolerance override.
pub fn parse_tolerance(s: &str) -> Result<(String, f64)> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("expected CHECK=VALUE, got '{s}'")))?;
    let v: f64 = v
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("bad tolerance value in '{s}'")))?;
    Ok((k.trim().to_string(), v))
}
