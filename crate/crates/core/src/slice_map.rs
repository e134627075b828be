//! Slice mappings `f = I(F)`: evaluation, the representation formula,
//! slice derivatives, per-slice holomorphy and the splitting into
//! holomorphic components over `C_I`.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::clifford::{CliffordElement, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::report::CheckRecord;
use crate::series::{Stem, StemSeries};
use crate::slice::{orbit_point_raw, SliceOrbit, SlicePoint};

/// Finite-difference step for holomorphy checks.
pub const FD_STEP: f64 = 1e-5;

/// Acceptance level for finite-difference holomorphy residuals.
pub const FD_THRESHOLD: f64 = 1e-7;

/// Pairs `(J, K)` whose difference has a smaller singular value are rejected.
pub const CONDITIONING_THRESHOLD: f64 = 1e-3;

/// The left slice mapping induced by a stem: `f(α + βJ) = F_1(z) + J F_2(z)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SliceMap<S = StemSeries> {
    stem: S,
}

impl<S: Stem> SliceMap<S> {
    pub fn new(stem: S) -> Self {
        SliceMap { stem }
    }

    pub fn stem(&self) -> &S {
        &self.stem
    }

    pub fn m(&self) -> usize {
        self.stem.m()
    }

    pub fn n(&self) -> usize {
        self.stem.n()
    }

    pub fn eval(&self, p: &SlicePoint) -> Vec<CliffordElement> {
        eval(self, p)
    }
}

impl SliceMap<StemSeries> {
    pub fn truncation(&self) -> usize {
        self.stem.truncation()
    }
}

impl From<StemSeries> for SliceMap<StemSeries> {
    fn from(s: StemSeries) -> Self {
        SliceMap::new(s)
    }
}

/// Value at `α + βJ` given raw slice coordinates.
pub fn eval_at<S: Stem>(f: &SliceMap<S>, alpha: &[f64], beta: &[f64], j: &CliffordElement) -> Vec<CliffordElement> {
    let (f1, f2) = f.stem.eval_stem(alpha, beta);
    f1.into_iter()
        .zip(&f2)
        .map(|(a, b)| &a + &(j * b))
        .collect()
}

pub fn eval<S: Stem>(f: &SliceMap<S>, p: &SlicePoint) -> Vec<CliffordElement> {
    eval_at(f, &p.alpha, &p.beta, &p.j)
}

/// Reconstructs `f(α + βI)` from the values on the slices `J` and `K`:
///
/// `f(α+βI) = (I-K)((J-K)^{-1} f(α+βJ)) - (I-J)((J-K)^{-1} f(α+βK))`.
pub fn representation<S: Stem>(
    f: &SliceMap<S>,
    o: &SliceOrbit,
    j: &CliffordElement,
    k: &CliffordElement,
    i: &CliffordElement,
) -> Result<Vec<CliffordElement>> {
    let diff = j.try_sub(k)?;
    if diff.max_abs() <= DEFAULT_TOL {
        return Err(Error::Representation("J and K coincide".into()));
    }
    let smin = diff.left_mul_min_singular();
    if smin < CONDITIONING_THRESHOLD {
        return Err(Error::Representation(format!(
            "J - K is ill-conditioned (smallest singular value {smin:e})"
        )));
    }
    let inv = diff
        .invert(DEFAULT_TOL)
        .map_err(|e| Error::Representation(e.to_string()))?;
    let fj = eval(f, &orbit_point_raw(o, j)?);
    let fk = eval(f, &orbit_point_raw(o, k)?);
    let i_minus_k = i - k;
    let i_minus_j = i - j;
    Ok(fj
        .iter()
        .zip(&fk)
        .map(|(vj, vk)| &(&i_minus_k * &(&inv * vj)) - &(&i_minus_j * &(&inv * vk)))
        .collect())
}

/// The `K = -J` case:
/// `f(α+βI) = ½(f(α+βJ) + f(α-βJ)) - (I/2)(J(f(α+βJ) - f(α-βJ)))`.
pub fn representation_conjugate_pair<S: Stem>(
    f: &SliceMap<S>,
    o: &SliceOrbit,
    j: &CliffordElement,
    i: &CliffordElement,
) -> Result<Vec<CliffordElement>> {
    let plus = eval(f, &orbit_point_raw(o, j)?);
    let minus = eval(f, &orbit_point_raw(o, &-j)?);
    let half_i = i.scale(0.5);
    Ok(plus
        .iter()
        .zip(&minus)
        .map(|(p, q)| {
            let mean = (p + q).scale(0.5);
            let jump = j * &(p - q);
            &mean - &(&half_i * &jump)
        })
        .collect())
}

/// `∂f/∂x_t := I(∂F/∂z_t)`.
pub fn slice_derivative(f: &SliceMap<StemSeries>, t: usize) -> SliceMap<StemSeries> {
    SliceMap::new(f.stem.derivative(t))
}

/// Largest `|∂f_I/∂α_t + I ∂f_I/∂β_t|` at one point of the slice `C_I`, `I = p.j`.
pub fn slice_holomorphy_residual<S: Stem>(f: &SliceMap<S>, p: &SlicePoint, step: f64) -> f64 {
    let n = f.n();
    let mut worst = 0.0f64;
    for t in 0..n {
        let shifted = |da: f64, db: f64| {
            let mut a = p.alpha.clone();
            let mut b = p.beta.clone();
            a[t] += da;
            b[t] += db;
            eval_at(f, &a, &b, &p.j)
        };
        let ap = shifted(step, 0.0);
        let am = shifted(-step, 0.0);
        let bp = shifted(0.0, step);
        let bm = shifted(0.0, -step);
        let h = 1.0 / (2.0 * step);
        for c in 0..n {
            let da = (&ap[c] - &am[c]).scale(h);
            let db = (&bp[c] - &bm[c]).scale(h);
            let r = &da + &(&p.j * &db);
            worst = worst.max(r.modulus());
        }
    }
    worst
}

/// Per-slice holomorphy: each sample fixes its own slice through `p.j`.
pub fn check_regularity<S: Stem>(f: &SliceMap<S>, samples: &[SlicePoint]) -> CheckRecord {
    let worst = samples
        .iter()
        .map(|p| slice_holomorphy_residual(f, p, FD_STEP))
        .fold(0.0, f64::max);
    CheckRecord::new("regularity", samples.len(), worst, FD_THRESHOLD)
        .param("step", FD_STEP)
        .param("m", f.m())
        .param("n", f.n())
}

/// A power series with complex vector coefficients, `Σ_k z^k c_k`, `c_k ∈ C^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexSeries {
    pub n: usize,
    pub terms: BTreeMap<Vec<u32>, Vec<Complex64>>,
}

impl ComplexSeries {
    pub fn eval(&self, z: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.n];
        for (k, c) in &self.terms {
            let zk = k
                .iter()
                .zip(z)
                .fold(Complex64::new(1.0, 0.0), |acc, (&e, zt)| acc * zt.powu(e));
            for (o, ci) in out.iter_mut().zip(c) {
                *o += zk * ci;
            }
        }
        out
    }

    /// Largest coefficient modulus.
    pub fn max_coeff(&self) -> f64 {
        self.terms
            .values()
            .flat_map(|c| c.iter().map(|x| x.norm()))
            .fold(0.0, f64::max)
    }
}

/// `f_I(z) = Σ_A F_A(z) I_A` over a module basis `{I_A}` of `R_m` over `C_I`.
#[derive(Clone, Debug)]
pub struct Splitting {
    pub i: CliffordElement,
    pub basis: Vec<CliffordElement>,
    pub components: Vec<ComplexSeries>,
}

impl Splitting {
    /// `Σ_A F_A(z) I_A`, with `p + qi ∈ C` read as `p + qI`.
    pub fn reassemble(&self, alpha: &[f64], beta: &[f64]) -> Vec<CliffordElement> {
        let m = self.i.m();
        let z: Vec<Complex64> = alpha
            .iter()
            .zip(beta)
            .map(|(&a, &b)| Complex64::new(a, b))
            .collect();
        let n = alpha.len();
        let mut out = vec![CliffordElement::zero(m); n];
        for (fa, ia) in self.components.iter().zip(&self.basis) {
            let i_ia = &self.i * ia;
            for (o, v) in out.iter_mut().zip(fa.eval(&z)) {
                o.add_scaled(ia, v.re);
                o.add_scaled(&i_ia, v.im);
            }
        }
        out
    }
}

/// Orthonormal completion of a unit 1-vector `I` in `span(e_1, …, e_m)`,
/// returning `[I, I_2, …, I_m]`.
fn orthonormal_vectors(i: &CliffordElement) -> Vec<CliffordElement> {
    let m = i.m();
    let mut frame = vec![i.clone()];
    for g in 1..=m {
        let mut v = CliffordElement::generator(m, g);
        for u in &frame {
            let d = v.dot(u);
            v.add_scaled(u, -d);
        }
        let r = v.modulus();
        if r > 1e-8 {
            frame.push(v.scale(1.0 / r));
        }
        if frame.len() == m {
            break;
        }
    }
    frame
}

/// Default module basis of `R_m` over `C_I` (`2^{m-1}` elements).
///
/// For a unit 1-vector `I` this is the set of ordered products `I_A` of an
/// orthonormal extension `I_2, …, I_m`; otherwise basis blades are chosen
/// greedily while they stay `C_I`-independent.
pub fn default_completion(i: &CliffordElement) -> Result<Vec<CliffordElement>> {
    let m = i.m();
    if m == 0 || !i.in_sqrt_minus_one(DEFAULT_TOL) {
        return Err(Error::NotImaginaryUnit(i.to_string()));
    }
    let target = 1usize << (m - 1);
    if i.is_vector(1e-12) {
        let frame = orthonormal_vectors(i);
        let rest = &frame[1..];
        let basis = (0..target)
            .map(|mask| {
                rest.iter()
                    .enumerate()
                    .filter(|(b, _)| mask & (1 << b) != 0)
                    .fold(CliffordElement::one(m), |acc, (_, v)| &acc * v)
            })
            .collect();
        return Ok(basis);
    }
    let d = 1usize << m;
    let mut basis: Vec<CliffordElement> = Vec::with_capacity(target);
    let mut columns: Vec<DVector<f64>> = Vec::with_capacity(d);
    for blade in 0..d {
        let mut e = CliffordElement::zero(m);
        e.set_coeff(crate::clifford::BladeIndex::from_bits(blade as u16), 1.0);
        let ie = i * &e;
        let mut trial = columns.clone();
        trial.push(DVector::from_column_slice(e.coeffs()));
        trial.push(DVector::from_column_slice(ie.coeffs()));
        let mat = DMatrix::from_columns(&trial);
        if mat.rank(1e-9) == trial.len() {
            columns = trial;
            basis.push(e);
            if basis.len() == target {
                break;
            }
        }
    }
    Ok(basis)
}

/// Splits `f` restricted to `C_I` into `2^{m-1}` holomorphic components.
pub fn split_components(
    f: &SliceMap<StemSeries>,
    i: &CliffordElement,
    basis_completion: Option<&[CliffordElement]>,
) -> Result<Splitting> {
    let basis = match basis_completion {
        Some(b) => b.to_vec(),
        None => default_completion(i)?,
    };
    let m = f.m();
    if i.m() != m || basis.iter().any(|b| b.m() != m) {
        return Err(Error::Dimension("basis and map must share m".into()));
    }
    if m == 0 || !i.in_sqrt_minus_one(DEFAULT_TOL) {
        return Err(Error::NotImaginaryUnit(i.to_string()));
    }
    let target = 1usize << (m - 1);
    if basis.len() != target {
        return Err(Error::Basis(format!(
            "expected {target} elements, got {}",
            basis.len()
        )));
    }
    let cols: Vec<DVector<f64>> = basis
        .iter()
        .flat_map(|b| {
            [
                DVector::from_column_slice(b.coeffs()),
                DVector::from_column_slice((i * b).coeffs()),
            ]
        })
        .collect();
    let mat = DMatrix::from_columns(&cols);
    let smin = mat.singular_values().iter().fold(f64::INFINITY, |a, &s| a.min(s));
    if smin < 1e-8 {
        return Err(Error::Basis(format!("change of basis is singular ({smin:e})")));
    }
    let lu = mat.lu();
    let n = f.n();
    let mut components: Vec<ComplexSeries> = (0..target)
        .map(|_| ComplexSeries {
            n,
            terms: BTreeMap::new(),
        })
        .collect();
    for (k, a) in f.stem().terms() {
        let mut per_component = vec![vec![Complex64::new(0.0, 0.0); n]; target];
        for (t, c) in a.iter().enumerate() {
            let rhs = DVector::from_column_slice(c.coeffs());
            let x = lu
                .solve(&rhs)
                .ok_or_else(|| Error::Basis("singular change of basis".into()))?;
            for (idx, slot) in per_component.iter_mut().enumerate() {
                slot[t] = Complex64::new(x[2 * idx], x[2 * idx + 1]);
            }
        }
        for (comp, coeffs) in components.iter_mut().zip(per_component) {
            comp.terms.insert(k.to_vec(), coeffs);
        }
    }
    Ok(Splitting {
        i: i.clone(),
        basis,
        components,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{koebe_map, RawStem};
    use crate::slice::{embed, SlicePoint};

    fn e(m: usize, idx: &[usize]) -> CliffordElement {
        CliffordElement::blade(m, idx).unwrap()
    }

    fn max_diff(a: &[CliffordElement], b: &[CliffordElement]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).max_abs()).fold(0.0, f64::max)
    }

    #[test]
    fn identity_map_embeds() {
        let f = SliceMap::new(StemSeries::identity(3, 2));
        let p = SlicePoint::new(vec![0.2, -0.5], vec![0.7, 0.1], e(3, &[1, 3])).unwrap();
        assert!(max_diff(&eval(&f, &p), &embed(&p)) < 1e-15);
    }

    #[test]
    fn well_defined_under_sign_flip() {
        let f = SliceMap::new(koebe_map(0.3, &e(3, &[2]), 40, 2).unwrap());
        let j = e(3, &[1]);
        let p = SlicePoint::new_raw(vec![0.1, 0.2], vec![0.3, -0.4], j.clone()).unwrap();
        let q = SlicePoint::new_raw(vec![0.1, 0.2], vec![-0.3, 0.4], -j).unwrap();
        assert_eq!(eval(&f, &p), eval(&f, &q));
    }

    #[test]
    fn koebe_on_real_axis() {
        let m = 2;
        let f = SliceMap::new(koebe_map(0.0, &e(m, &[1]), 300, 1).unwrap());
        for x in [-0.9, -0.5, 0.0, 0.3, 0.9] {
            let v = eval(&f, &SlicePoint::real(m, vec![x]));
            let expect = x / (1.0 - x) / (1.0 - x);
            assert!((v[0].scalar_part() - expect).abs() <= 1e-9, "{x}");
            assert!(v[0].non_scalar_max() <= 1e-12);
        }
    }

    #[test]
    fn representation_collapses_when_i_is_j() {
        let f = SliceMap::new(koebe_map(0.5, &e(3, &[1]), 20, 2).unwrap());
        let o = SliceOrbit::new(vec![0.1, -0.2], vec![0.3, 0.2]).unwrap();
        let j = e(3, &[2]);
        let k = e(3, &[3]);
        let r = representation(&f, &o, &j, &k, &j).unwrap();
        let direct = eval(&f, &orbit_point_raw(&o, &j).unwrap());
        assert!(max_diff(&r, &direct) < 1e-14);
    }

    #[test]
    fn conjugate_pair_matches_general_formula() {
        let f = SliceMap::new(koebe_map(0.5, &e(3, &[1]), 20, 2).unwrap());
        let o = SliceOrbit::new(vec![0.1, -0.2], vec![0.3, 0.2]).unwrap();
        let j = e(3, &[2]);
        let i = e(3, &[1, 3]);
        let general = representation(&f, &o, &j, &-&j, &i).unwrap();
        let special = representation_conjugate_pair(&f, &o, &j, &i).unwrap();
        let direct = eval(&f, &orbit_point_raw(&o, &i).unwrap());
        assert!(max_diff(&general, &special) < 1e-13);
        assert!(max_diff(&general, &direct) < 1e-13);
    }

    #[test]
    fn representation_rejects_degenerate_pairs() {
        let f = SliceMap::new(StemSeries::identity(3, 1));
        let o = SliceOrbit::new(vec![0.1], vec![0.3]).unwrap();
        let j = e(3, &[2]);
        assert!(matches!(
            representation(&f, &o, &j, &j, &j),
            Err(Error::Representation(_))
        ));
        // e12 - e3 is a zero divisor in R_3
        assert!(matches!(
            representation(&f, &o, &e(3, &[1, 2]), &e(3, &[3]), &j),
            Err(Error::Representation(_))
        ));
    }

    #[test]
    fn derivative_of_identity() {
        let f = SliceMap::new(StemSeries::identity(2, 2));
        let d = slice_derivative(&f, 0);
        let p = SlicePoint::new(vec![0.3, 0.1], vec![0.2, 0.4], e(2, &[2])).unwrap();
        assert_eq!(eval(&d, &p), vec![CliffordElement::one(2), CliffordElement::zero(2)]);
    }

    #[test]
    fn regularity_examples() {
        let m = 2;
        let pts: Vec<SlicePoint> = [e(m, &[1]), e(m, &[2]), e(m, &[1, 2])]
            .into_iter()
            .map(|j| SlicePoint::new(vec![0.2], vec![-0.3], j).unwrap())
            .collect();
        let k = SliceMap::new(koebe_map(0.9, &e(m, &[1]), 60, 1).unwrap());
        assert!(check_regularity(&k, &pts).pass);

        let bad = SliceMap::new(RawStem::real_part(m, 1));
        let rec = check_regularity(&bad, &pts);
        assert!(!rec.pass);
        assert!(rec.max_error > 0.5);

        let c = SliceMap::new(StemSeries::constant(vec![e(m, &[1])]).unwrap());
        assert!(check_regularity(&c, &pts).max_error <= 1e-14);
    }

    #[test]
    fn split_in_complex_case_is_f_itself() {
        let m = 1;
        let i = e(m, &[1]);
        let f = SliceMap::new(koebe_map(0.2, &i, 15, 1).unwrap());
        let s = split_components(&f, &i, None).unwrap();
        assert_eq!(s.basis, vec![CliffordElement::one(m)]);
        assert_eq!(s.components.len(), 1);
        let v = s.components[0].eval(&[Complex64::new(0.3, 0.4)]);
        let direct = eval(&f, &SlicePoint::new(vec![0.3], vec![0.4], i).unwrap());
        assert!((v[0].re - direct[0].coeffs()[0]).abs() < 1e-14);
        assert!((v[0].im - direct[0].coeffs()[1]).abs() < 1e-14);
    }

    #[test]
    fn koebe_splits_into_single_component() {
        let m = 2;
        let i = e(m, &[1]);
        let f = SliceMap::new(koebe_map(0.8, &i, 30, 2).unwrap());
        let basis = vec![CliffordElement::one(m), e(m, &[2])];
        let s = split_components(&f, &i, Some(&basis)).unwrap();
        assert_eq!(s.components.len(), 2);
        assert!(s.components[1].max_coeff() < 1e-14);
        let p = SlicePoint::new(vec![0.1, 0.3], vec![0.2, -0.1], i).unwrap();
        assert!(max_diff(&s.reassemble(&p.alpha, &p.beta), &eval(&f, &p)) < 1e-12);
    }

    #[test]
    fn split_rejects_bad_basis() {
        let m = 2;
        let i = e(m, &[1]);
        let f = SliceMap::new(StemSeries::identity(m, 1));
        // I·1 = e1 lies in the C_I-span of 1
        let bad = vec![CliffordElement::one(m), i.clone()];
        assert!(matches!(split_components(&f, &i, Some(&bad)), Err(Error::Basis(_))));
        let short = vec![CliffordElement::one(m)];
        assert!(matches!(split_components(&f, &i, Some(&short)), Err(Error::Basis(_))));
    }

    #[test]
    fn default_completion_sizes() {
        for m in 1..=4 {
            let v = default_completion(&e(m, &[1])).unwrap();
            assert_eq!(v.len(), 1 << (m - 1));
        }
        let b = default_completion(&e(3, &[1, 2])).unwrap();
        assert_eq!(b.len(), 4);
    }
}
