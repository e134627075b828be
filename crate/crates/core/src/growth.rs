//! The extremal-norm profile over an orbit, numerical starlike/convex
//! hypothesis checks, and growth-theorem verification on the unit ball.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::clifford::{CliffordElement, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::report::{CheckRecord, GrowthRecord, HypothesisStatus};
use crate::series::{tail_bound, Stem, StemSeries, UnivariateSeries};
use crate::slice::{orbit_point_raw, point_norm, sample_s, SamplingStrategy, SliceOrbit, SlicePoint};
use crate::slice_map::{eval, split_components, ComplexSeries, SliceMap};

/// Tolerance for "value lies in `C_I`".
pub const SLICE_VALUE_TOL: f64 = 1e-9;

/// `‖v‖ = sqrt(Σ_t |v_t|²)`.
pub fn vector_norm(v: &[CliffordElement]) -> f64 {
    v.iter().map(CliffordElement::modulus_sq).sum::<f64>().sqrt()
}

/// Reads `y ∈ C_I` as a complex number `p + qi`, or reports how far off it is.
fn as_slice_complex(y: &CliffordElement, i: &CliffordElement) -> (Complex64, f64) {
    let p = y.scalar_part();
    let q = y.dot(i) - p * i.scalar_part();
    let mut r = y.clone().add_scalar(-p);
    r.add_scaled(i, -q);
    (Complex64::new(p, q), r.modulus())
}

/// The linear profile `g(u) = c0 - c1·u` of `‖f(α + Jβ)‖²` in `u = ⟨J, I⟩`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtremalProfile {
    /// `A = ½(f(z) + f(z̄))`.
    pub value_a: Vec<CliffordElement>,
    /// `B = -(I/2)(f(z) - f(z̄))`.
    pub value_b: Vec<CliffordElement>,
    /// `B_t A_t^{-1} = a_t + I b_t`; `None` where `A_t = 0`.
    pub a: Vec<Option<f64>>,
    pub b: Vec<Option<f64>>,
    pub c0: f64,
    pub c1: f64,
}

impl ExtremalProfile {
    pub fn g(&self, u: f64) -> f64 {
        self.c0 - self.c1 * u
    }

    /// `(max, min)` of `g` over `[-1, 1]`, attained at `u = ±1`.
    pub fn extremes(&self) -> (f64, f64) {
        let (p, q) = (self.g(1.0), self.g(-1.0));
        (p.max(q), p.min(q))
    }
}

/// Coordinate of `J` along `I`.
pub fn u_coordinate(j: &CliffordElement, i: &CliffordElement) -> f64 {
    j.dot(i)
}

pub fn extremal_profile<S: Stem>(
    f: &SliceMap<S>,
    o: &SliceOrbit,
    i: &CliffordElement,
) -> Result<ExtremalProfile> {
    let fz = eval(f, &orbit_point_raw(o, i)?);
    let fzb = eval(f, &orbit_point_raw(o, &-i)?);
    let half_i = i.scale(0.5);
    let mut value_a = Vec::with_capacity(fz.len());
    let mut value_b = Vec::with_capacity(fz.len());
    let (mut a_coef, mut b_coef) = (Vec::new(), Vec::new());
    let (mut c0, mut c1) = (0.0, 0.0);
    for (p, q) in fz.iter().zip(&fzb) {
        let a = (p + q).scale(0.5);
        let b = -(&half_i * &(p - q));
        let (ac, off_a) = as_slice_complex(&a, i);
        let (bc, off_b) = as_slice_complex(&b, i);
        let scale = 1.0 + a.modulus() + b.modulus();
        if off_a > SLICE_VALUE_TOL * scale || off_b > SLICE_VALUE_TOL * scale {
            return Err(Error::Hypothesis(format!(
                "f leaves the slice C_I on this orbit (offset {:e})",
                off_a.max(off_b)
            )));
        }
        // (1 + a² + b²)|A|² = |A|² + |B|² and b|A|² = Im(B·conj A)
        c0 += ac.norm_sqr() + bc.norm_sqr();
        c1 += 2.0 * (bc * ac.conj()).im;
        if ac.norm_sqr() > 0.0 {
            let w = bc / ac;
            a_coef.push(Some(w.re));
            b_coef.push(Some(w.im));
        } else {
            a_coef.push(None);
            b_coef.push(None);
        }
        value_a.push(a);
        value_b.push(b);
    }
    Ok(ExtremalProfile {
        value_a,
        value_b,
        a: a_coef,
        b: b_coef,
        c0,
        c1,
    })
}

/// An element of `S_m` orthogonal to and anticommuting with `I`, so that
/// `uI + sqrt(1-u²) I_⊥ ∈ S_m` for every `u ∈ [-1, 1]`.
pub fn orthogonal_unit(i: &CliffordElement) -> Result<CliffordElement> {
    let m = i.m();
    for bits in 1u16..(1 << m) {
        if !matches!(bits.count_ones() % 4, 1 | 2) {
            continue;
        }
        let mut b = CliffordElement::zero(m);
        b.set_coeff(crate::clifford::BladeIndex::from_bits(bits), 1.0);
        let d = b.dot(i);
        b.add_scaled(i, -d);
        let r = b.modulus();
        if r < 1e-8 {
            continue;
        }
        let b = b.scale(1.0 / r);
        let anti = &(i * &b) + &(&b * i);
        if anti.max_abs() < 1e-12 && b.in_sqrt_minus_one(DEFAULT_TOL) {
            return Ok(b);
        }
    }
    Err(Error::Hypothesis(format!("no unit orthogonal to {i} in S_{m}")))
}

/// Least-squares residual (max abs) of `‖f(α + J_u β)‖²` against a line in
/// `u`, over `count` equispaced `u ∈ [-1, 1]`.
pub fn profile_linearity<S: Stem>(
    f: &SliceMap<S>,
    o: &SliceOrbit,
    i: &CliffordElement,
    count: usize,
) -> Result<f64> {
    let perp = orthogonal_unit(i)?;
    let mut us = Vec::with_capacity(count);
    let mut ys = Vec::with_capacity(count);
    for s in 0..count {
        let u = -1.0 + 2.0 * s as f64 / (count - 1) as f64;
        let v = (1.0 - u * u).max(0.0).sqrt();
        let mut j = i.scale(u);
        j.add_scaled(&perp, v);
        let val = eval(f, &orbit_point_raw(o, &j)?);
        us.push(u);
        ys.push(vector_norm(&val).powi(2));
    }
    let n = count as f64;
    let mu = us.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = us.iter().zip(&ys).map(|(u, y)| (u - mu) * (y - my)).sum();
    let sxx: f64 = us.iter().map(|u| (u - mu).powi(2)).sum();
    let slope = sxy / sxx;
    Ok(us
        .iter()
        .zip(&ys)
        .map(|(u, y)| (y - (my + slope * (u - mu))).abs())
        .fold(0.0, f64::max))
}

/// Sampled extrema of `‖f(α + Jβ)‖` never leave the range spanned by `J = ±I`.
pub fn verify_extremal<S: Stem>(
    f: &SliceMap<S>,
    o: &SliceOrbit,
    i: &CliffordElement,
    samples: &[CliffordElement],
) -> Result<CheckRecord> {
    let plus = vector_norm(&eval(f, &orbit_point_raw(o, i)?));
    let minus = vector_norm(&eval(f, &orbit_point_raw(o, &-i)?));
    let (hi, lo) = (plus.max(minus), plus.min(minus));
    let mut excess = 0.0f64;
    for j in samples {
        let v = vector_norm(&eval(f, &orbit_point_raw(o, j)?));
        excess = excess.max(v - hi).max(lo - v);
    }
    Ok(CheckRecord::new("extremal-endpoints", samples.len(), excess, 1e-9))
}

/// `Re⟨w, z⟩` with `Df(z) w = f(z)` for a `C^n`-valued power series.
pub struct StarlikeCriterion {
    map: ComplexSeries,
    jacobian: Vec<ComplexSeries>,
}

fn complex_partial(s: &ComplexSeries, var: usize) -> ComplexSeries {
    let mut out = ComplexSeries {
        n: s.n,
        terms: Default::default(),
    };
    for (k, c) in &s.terms {
        if k[var] == 0 {
            continue;
        }
        let f = f64::from(k[var]);
        let mut k2 = k.clone();
        k2[var] -= 1;
        let entry = out
            .terms
            .entry(k2)
            .or_insert_with(|| vec![Complex64::new(0.0, 0.0); s.n]);
        for (e, ci) in entry.iter_mut().zip(c) {
            *e += ci * f;
        }
    }
    out
}

impl StarlikeCriterion {
    /// Identifies `C_I` with `C` through the `C_I`-splitting of `f`; the
    /// components off `I_∅ = 1` must vanish.
    pub fn new(f: &SliceMap<StemSeries>, i: &CliffordElement) -> Result<Self> {
        let split = split_components(f, i, None)?;
        let one = CliffordElement::one(i.m());
        let idx = split
            .basis
            .iter()
            .position(|b| (b - &one).max_abs() < 1e-12)
            .ok_or_else(|| Error::Basis("completion does not contain 1".into()))?;
        for (k, comp) in split.components.iter().enumerate() {
            if k != idx && comp.max_coeff() > SLICE_VALUE_TOL {
                return Err(Error::Hypothesis("f(B_I) is not contained in C_I^n".into()));
            }
        }
        let map = split.components[idx].clone();
        let jacobian = (0..map.n).map(|v| complex_partial(&map, v)).collect();
        Ok(StarlikeCriterion { map, jacobian })
    }

    pub fn at(&self, z: &[Complex64]) -> Result<f64> {
        let n = self.map.n;
        let fz = self.map.eval(z);
        let cols: Vec<Vec<Complex64>> = self.jacobian.iter().map(|d| d.eval(z)).collect();
        let jac = DMatrix::from_fn(n, n, |r, c| cols[c][r]);
        let rhs = DVector::from_vec(fz);
        let w = jac
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::Criterion("singular Jacobian".into()))?;
        if w.iter().any(|x| !x.re.is_finite() || !x.im.is_finite()) {
            return Err(Error::Criterion("singular Jacobian".into()));
        }
        Ok(w.iter().zip(z).map(|(wt, zt)| (wt * zt.conj()).re).sum())
    }
}

/// Starlikeness criterion of `f_I` at `z ∈ C_I^n` (positive means satisfied).
pub fn starlike_criterion_slice(
    f: &SliceMap<StemSeries>,
    i: &CliffordElement,
    z: &[Complex64],
) -> Result<f64> {
    StarlikeCriterion::new(f, i)?.at(z)
}

/// `Re(1 + x f''(x) / f'(x))` for a one-variable series with coefficients in `C_I`.
pub fn convex_criterion_1d(series: &UnivariateSeries, i: &CliffordElement, x: Complex64) -> Result<f64> {
    let mut coeffs = Vec::with_capacity(series.coeffs().len());
    for c in series.coeffs() {
        let (z, off) = as_slice_complex(c, i);
        if off > SLICE_VALUE_TOL * (1.0 + c.modulus()) {
            return Err(Error::Hypothesis("coefficients leave C_I".into()));
        }
        coeffs.push(z);
    }
    let (mut d1, mut d2) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
    for (k, c) in coeffs.iter().enumerate().rev() {
        let k = k as f64;
        if k >= 1.0 {
            d1 = d1 * x + c * k;
        }
    }
    for (k, c) in coeffs.iter().enumerate().rev() {
        let k = k as f64;
        if k >= 2.0 {
            d2 = d2 * x + c * (k * (k - 1.0));
        }
    }
    // Horner above leaves d1 = Σ k c_k x^{k-1}, d2 = Σ k(k-1) c_k x^{k-2}
    if d1.norm() < 1e-14 {
        return Err(Error::Criterion("f' vanishes".into()));
    }
    Ok((Complex64::new(1.0, 0.0) + x * d2 / d1).re)
}

/// Which growth theorem applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Starlike,
    Convex,
}

impl Family {
    /// `(lower, upper)` envelope at radius `r`.
    pub fn bounds(self, r: f64) -> (f64, f64) {
        match self {
            Family::Starlike => (r / (1.0 + r).powi(2), r / (1.0 - r).powi(2)),
            Family::Convex => (r / (1.0 + r), r / (1.0 - r)),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::Starlike => "starlike",
            Family::Convex => "convex",
        }
    }
}

/// Uniform point of the ball `‖x‖ ≤ r_max` on a random slice.
pub fn sample_ball_point<R: Rng + ?Sized>(
    rng: &mut R,
    m: usize,
    n: usize,
    r_max: f64,
    strategy: SamplingStrategy,
) -> Result<SlicePoint> {
    let j = sample_s(rng, m, strategy)?;
    let mut coords: Vec<f64> = (0..2 * n).map(|_| rng.sample(StandardNormal)).collect();
    let norm = coords.iter().map(|c| c * c).sum::<f64>().sqrt().max(1e-300);
    let radius = r_max * rng.random::<f64>().powf(1.0 / (2 * n) as f64);
    coords.iter_mut().for_each(|c| *c *= radius / norm);
    SlicePoint::new_raw(coords[..n].to_vec(), coords[n..].to_vec(), j)
}

/// Result of spot-checking a growth hypothesis.
pub fn hypothesis_status(
    f: &SliceMap<StemSeries>,
    i: &CliffordElement,
    family: Family,
    points: &[SlicePoint],
) -> HypothesisStatus {
    if points.is_empty() {
        return HypothesisStatus::NotChecked;
    }
    let to_complex = |p: &SlicePoint| -> Vec<Complex64> {
        p.alpha
            .iter()
            .zip(&p.beta)
            .map(|(&a, &b)| Complex64::new(a, b))
            .collect()
    };
    let ok = match family {
        Family::Starlike => match StarlikeCriterion::new(f, i) {
            Ok(c) => points
                .iter()
                .all(|p| point_norm(p) == 0.0 || c.at(&to_complex(p)).is_ok_and(|v| v > 0.0)),
            Err(_) => false,
        },
        Family::Convex => {
            // per-component one-variable check on the coordinate axes
            let components = match univariate_components(f) {
                Some(c) => c,
                None => return HypothesisStatus::NotChecked,
            };
            points.iter().all(|p| {
                to_complex(p).iter().zip(&components).all(|(z, s)| {
                    z.norm() == 0.0 || convex_criterion_1d(s, i, *z).is_ok_and(|v| v > 0.0)
                })
            })
        }
    };
    if ok {
        HypothesisStatus::Passed
    } else {
        HypothesisStatus::Failed
    }
}

/// Recovers `f_t(x) = Σ_d x_t^d a_{t,d}` when every term of `f` touches only
/// its own variable; `None` for genuinely multivariate maps.
pub fn univariate_components(f: &SliceMap<StemSeries>) -> Option<Vec<UnivariateSeries>> {
    let n = f.n();
    let m = f.m();
    let mut per: Vec<Vec<CliffordElement>> = vec![vec![CliffordElement::zero(m)]; n];
    for (k, a) in f.stem().terms() {
        let nonzero: Vec<usize> = (0..n).filter(|&t| k[t] > 0).collect();
        match nonzero.as_slice() {
            [] => {
                for t in 0..n {
                    per[t][0].add_scaled(&a[t], 1.0);
                }
            }
            [t] => {
                let t = *t;
                if a.iter().enumerate().any(|(c, v)| c != t && v.max_abs() > 0.0) {
                    return None;
                }
                let d = k[t] as usize;
                if per[t].len() <= d {
                    per[t].resize(d + 1, CliffordElement::zero(m));
                }
                per[t][d].add_scaled(&a[t], 1.0);
            }
            _ => return None,
        }
    }
    per.into_iter()
        .map(|c| UnivariateSeries::new(m, c).ok())
        .collect()
}

/// Parameters describing the map under test, echoed into the record.
#[derive(Clone, Debug)]
pub struct GrowthCase<'a> {
    pub map_name: &'a str,
    pub map_i: &'a CliffordElement,
    pub family: Family,
    pub theta: f64,
    pub r_max: f64,
}

/// Largest `(lower - ‖f‖, ‖f‖ - upper)` over the points, clamped at zero.
fn ball_violations<S: Stem>(f: &SliceMap<S>, family: Family, points: &[SlicePoint]) -> (f64, f64) {
    points.iter().fold((0.0f64, 0.0f64), |(lo, hi), p| {
        let r = point_norm(p);
        let v = vector_norm(&eval(f, p));
        let (lb, ub) = family.bounds(r);
        (lo.max(lb - v), hi.max(v - ub))
    })
}

/// Both growth inequalities on the ball, with slack `tail_bound(f, r_max)`.
pub fn growth_check_ball(
    f: &SliceMap<StemSeries>,
    case: &GrowthCase<'_>,
    points: &[SlicePoint],
    hypothesis: HypothesisStatus,
) -> GrowthRecord {
    let (lo, hi) = ball_violations(f, case.family, points);
    let mut rec = GrowthRecord {
        check: "growth-ball".into(),
        family: case.family.name().into(),
        map: case.map_name.into(),
        unit: case.map_i.to_string(),
        m: f.m(),
        n: f.n(),
        theta: case.theta,
        r_max: case.r_max,
        samples: points.len(),
        truncation: f.truncation(),
        hypothesis_status: hypothesis,
        max_violation_lower: lo,
        max_violation_upper: hi,
        tail_bound: tail_bound(f.stem(), case.r_max),
        pass: false,
        asserted: hypothesis == HypothesisStatus::Passed,
    };
    rec.pass = rec.within_slack();
    rec
}

/// Gap between `‖f(∓r, 0, …, 0)‖` and the envelope `(lower, upper)` at `r`.
pub fn sharpness_gaps<S: Stem>(f: &SliceMap<S>, family: Family, r: f64) -> (f64, f64) {
    let n = f.n();
    let m = f.m();
    let axis = |x: f64| {
        let mut a = vec![0.0; n];
        a[0] = x;
        SlicePoint::real(m, a)
    };
    let (lb, ub) = family.bounds(r);
    let at_minus = vector_norm(&eval(f, &axis(-r)));
    let at_plus = vector_norm(&eval(f, &axis(r)));
    ((at_minus - lb).abs(), (at_plus - ub).abs())
}

/// Sharpness on the real axis for each radius.
pub fn sharpness_check<S: Stem>(f: &SliceMap<S>, family: Family, radii: &[f64]) -> CheckRecord {
    let worst = radii
        .iter()
        .map(|&r| {
            let (a, b) = sharpness_gaps(f, family, r);
            a.max(b)
        })
        .fold(0.0, f64::max);
    CheckRecord::new("growth-sharpness", radii.len(), worst, 1e-8).param("family", family.name())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{
        cayley_component, convex_test_map, koebe_component, koebe_map, ConvexVariant,
    };
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn e(m: usize, idx: &[usize]) -> CliffordElement {
        CliffordElement::blade(m, idx).unwrap()
    }

    #[test]
    fn real_orbit_has_flat_profile() {
        let f = SliceMap::new(koebe_map(0.4, &e(3, &[1]), 60, 2).unwrap());
        let o = SliceOrbit::new(vec![0.2, -0.3], vec![0.0, 0.0]).unwrap();
        let p = extremal_profile(&f, &o, &e(3, &[1])).unwrap();
        assert!(p.value_b.iter().all(|b| b.max_abs() == 0.0));
        assert_eq!(p.c1, 0.0);
    }

    #[test]
    fn identity_profile_is_flat() {
        let f = SliceMap::new(StemSeries::identity(3, 2));
        let o = SliceOrbit::new(vec![0.2, 0.0], vec![0.5, 0.4]).unwrap();
        let i = e(3, &[2]);
        let p = extremal_profile(&f, &o, &i).unwrap();
        assert!(p.b.iter().flatten().all(|b| b.abs() < 1e-15));
        assert!(p.c1.abs() < 1e-15);
        // A_2 = 0: routed into c0 as |B_2|²
        assert_eq!(p.a[1], None);
        assert!((p.c0 - (0.04 + 0.25 + 0.16)).abs() < 1e-15);
    }

    #[test]
    fn koebe_profile_matches_sampled_norms() {
        let m = 3;
        let i = e(m, &[1]);
        let f = SliceMap::new(koebe_map(0.7, &i, 120, 2).unwrap());
        let o = SliceOrbit::new(vec![0.2, -0.1], vec![0.3, 0.25]).unwrap();
        let prof = extremal_profile(&f, &o, &i).unwrap();
        assert!(prof.c1.abs() > 1e-3, "choose an orbit with a non-trivial slope");
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for k in 0..50 {
            let strategy = if k % 2 == 0 {
                SamplingStrategy::Vector
            } else {
                SamplingStrategy::Rejection
            };
            let j = sample_s(&mut rng, m, strategy).unwrap();
            let direct = vector_norm(&eval(&f, &orbit_point_raw(&o, &j).unwrap())).powi(2);
            let u = u_coordinate(&j, &i);
            assert!((prof.g(u) - direct).abs() <= 1e-9, "J = {j}");
        }
        // endpoints agree with direct norms
        let plus = vector_norm(&eval(&f, &orbit_point_raw(&o, &i).unwrap()));
        assert!((prof.g(1.0).sqrt() - plus).abs() < 1e-10);
    }

    #[test]
    fn off_slice_values_violate_hypothesis() {
        let m = 2;
        // coefficient e2 does not lie in C_{e1}
        let mut s = StemSeries::new(m, 1, 1);
        s.add_term(vec![1], vec![e(m, &[2])]).unwrap();
        let f = SliceMap::new(s);
        let o = SliceOrbit::new(vec![0.2], vec![0.3]).unwrap();
        assert!(matches!(
            extremal_profile(&f, &o, &e(m, &[1])),
            Err(Error::Hypothesis(_))
        ));
    }

    #[test]
    fn linearity_and_endpoint_checks() {
        let m = 2;
        let i = e(m, &[1, 2]);
        let f = SliceMap::new(koebe_map(1.1, &i, 120, 1).unwrap());
        let o = SliceOrbit::new(vec![-0.3], vec![0.4]).unwrap();
        assert!(profile_linearity(&f, &o, &i, 11).unwrap() < 1e-9);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let js: Vec<_> = (0..200)
            .map(|_| sample_s(&mut rng, m, SamplingStrategy::Rejection).unwrap())
            .collect();
        assert!(verify_extremal(&f, &o, &i, &js).unwrap().pass);
    }

    #[test]
    fn starlike_examples() {
        let m = 2;
        let i = e(m, &[1]);
        let id = SliceMap::new(StemSeries::identity(m, 2));
        let z = [Complex64::new(0.3, 0.1), Complex64::new(-0.2, 0.4)];
        let v = starlike_criterion_slice(&id, &i, &z).unwrap();
        assert!((v - (0.09 + 0.01 + 0.04 + 0.16)).abs() < 1e-15);

        let bad = SliceMap::new(convex_test_map(0.0, &i, 2, 2, ConvexVariant::PaperExample).unwrap());
        let z = [Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.0)];
        // w_1 = 0.6·0.4 / (1 - 1.2) = -1.2, so Re⟨w, z⟩ = -0.72
        let v = starlike_criterion_slice(&bad, &i, &z).unwrap();
        assert!((v + 0.72).abs() < 1e-12, "{v}");
        let z = [Complex64::new(0.5, 0.0), Complex64::new(0.1, 0.0)];
        assert!(matches!(
            starlike_criterion_slice(&bad, &i, &z),
            Err(Error::Criterion(_))
        ));
    }

    #[test]
    fn convex_examples() {
        let m = 2;
        let i = e(m, &[1]);
        let id = UnivariateSeries::x(m);
        assert_eq!(convex_criterion_1d(&id, &i, Complex64::new(0.4, 0.2)).unwrap(), 1.0);
        let cayley = cayley_component(0.0, &i, 300).unwrap();
        let v = convex_criterion_1d(&cayley, &i, Complex64::new(0.5, 0.0)).unwrap();
        assert!((v - 3.0).abs() < 1e-12, "{v}");
        // Koebe: 1 + x(2x + 4)/((1 + x)(1 - x)); negative on the left half-axis
        let koebe = koebe_component(0.0, &i, 600).unwrap();
        let at = |x: f64| 1.0 + x * (2.0 * x + 4.0) / ((1.0 + x) * (1.0 - x));
        let neg = convex_criterion_1d(&koebe, &i, Complex64::new(-0.9, 0.0)).unwrap();
        assert!((neg - at(-0.9)).abs() < 1e-9 && neg < 0.0, "{neg}");
        let pos = convex_criterion_1d(&koebe, &i, Complex64::new(0.9, 0.0)).unwrap();
        assert!((pos - at(0.9)).abs() < 1e-7 && pos > 0.0, "{pos}");
    }

    #[test]
    fn koebe_sharpness_on_axis() {
        let m = 2;
        let f = SliceMap::new(koebe_map(0.0, &e(m, &[1]), 300, 2).unwrap());
        let radii: Vec<f64> = (1..=9).map(|k| k as f64 / 10.0).collect();
        let rec = sharpness_check(&f, Family::Starlike, &radii);
        assert!(rec.pass, "{}", rec.max_error);
        let zero = vec![SlicePoint::real(m, vec![0.0, 0.0])];
        let case = GrowthCase {
            map_name: "koebe",
            map_i: &e(m, &[1]),
            family: Family::Starlike,
            theta: 0.0,
            r_max: 0.9,
        };
        let g = growth_check_ball(&f, &case, &zero, HypothesisStatus::Passed);
        assert_eq!((g.max_violation_lower, g.max_violation_upper), (0.0, 0.0));
    }

    #[test]
    fn ball_samples_stay_inside() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..500 {
            let p = sample_ball_point(&mut rng, 3, 2, 0.9, SamplingStrategy::Vector).unwrap();
            assert!(point_norm(&p) <= 0.9 + 1e-15);
        }
    }

    #[test]
    fn univariate_components_roundtrip() {
        let m = 2;
        let i = e(m, &[1]);
        let f = SliceMap::new(koebe_map(0.3, &i, 10, 3).unwrap());
        let comps = univariate_components(&f).unwrap();
        assert_eq!(comps.len(), 3);
        assert_eq!(comps[2].coeffs(), koebe_component(0.3, &i, 10).unwrap().coeffs());
        let mut mixed = StemSeries::new(m, 2, 2);
        mixed
            .add_term(vec![1, 1], vec![CliffordElement::one(m), CliffordElement::zero(m)])
            .unwrap();
        assert!(univariate_components(&SliceMap::new(mixed)).is_none());
    }
}
