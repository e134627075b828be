//! Stem mappings as truncated power series with Clifford coefficients, and
//! the one-variable `*`-product algebra.
//!
//! A stem `F(z) = Σ_k z^k a_k` with `a_k ∈ (R_m)^n` splits as `F = F_1 + iF_2`
//! by separating real and imaginary parts of the complex monomials `z^k`.
//! Real Clifford coefficients make every such `F` complex intrinsic.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::clifford::{CliffordElement, DEFAULT_TOL};
use crate::error::{Error, Result};

/// Default truncation degree for the infinite extremal families.
pub const DEFAULT_TRUNCATION: usize = 300;

/// Anything that evaluates a stem `F = F_1 + iF_2` at `z = α + iβ`.
pub trait Stem: Sync {
    fn m(&self) -> usize;
    fn n(&self) -> usize;
    fn eval_stem(&self, alpha: &[f64], beta: &[f64]) -> (Vec<CliffordElement>, Vec<CliffordElement>);
}

/// How the dropped tail of an infinite family is bounded.
///
/// `PowerLaw { power, shift }` states that the coefficient of every dropped
/// monomial of total degree `d` has modulus at most `(d + shift)^power`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailModel {
    /// The series is the whole map.
    #[default]
    Exact,
    PowerLaw { power: u32, shift: u32 },
}

impl TailModel {
    /// Coefficients `d` on `x^d`: the Koebe family.
    pub const KOEBE: TailModel = TailModel::PowerLaw { power: 1, shift: 0 };
    /// Unit coefficients: the geometric (Cayley) family.
    pub const GEOMETRIC: TailModel = TailModel::PowerLaw { power: 0, shift: 0 };

    fn derivative(self) -> TailModel {
        match self {
            TailModel::Exact => TailModel::Exact,
            TailModel::PowerLaw { power, shift } => TailModel::PowerLaw {
                power: power + 1,
                shift: shift + 1,
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct Term {
    k: Vec<u32>,
    a: Vec<CliffordElement>,
}

#[derive(Serialize, Deserialize)]
struct RawSeries {
    m: usize,
    n: usize,
    #[serde(rename = "N")]
    truncation: usize,
    terms: Vec<Term>,
    #[serde(default, skip_serializing_if = "is_exact")]
    tail: TailModel,
}

fn is_exact(t: &TailModel) -> bool {
    *t == TailModel::Exact
}

/// A multivariate stem series `F(z) = Σ_k z^k a_k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSeries", into = "RawSeries")]
pub struct StemSeries {
    m: usize,
    n: usize,
    truncation: usize,
    terms: BTreeMap<Vec<u32>, Vec<CliffordElement>>,
    tail: TailModel,
}

impl TryFrom<RawSeries> for StemSeries {
    type Error = Error;

    fn try_from(raw: RawSeries) -> Result<Self> {
        let mut s = StemSeries::new(raw.m, raw.n, raw.truncation);
        for t in raw.terms {
            s.add_term(t.k, t.a)?;
        }
        s.tail = raw.tail;
        Ok(s)
    }
}

impl From<StemSeries> for RawSeries {
    fn from(s: StemSeries) -> Self {
        RawSeries {
            m: s.m,
            n: s.n,
            truncation: s.truncation,
            terms: s.terms.into_iter().map(|(k, a)| Term { k, a }).collect(),
            tail: s.tail,
        }
    }
}

impl StemSeries {
    pub fn new(m: usize, n: usize, truncation: usize) -> Self {
        StemSeries {
            m,
            n,
            truncation,
            terms: BTreeMap::new(),
            tail: TailModel::Exact,
        }
    }

    /// `F(z) = z`.
    pub fn identity(m: usize, n: usize) -> Self {
        let mut s = StemSeries::new(m, n, 1);
        for t in 0..n {
            let mut k = vec![0; n];
            k[t] = 1;
            let mut a = vec![CliffordElement::zero(m); n];
            a[t] = CliffordElement::one(m);
            s.add_term(k, a).expect("well-formed");
        }
        s
    }

    pub fn constant(value: Vec<CliffordElement>) -> Result<Self> {
        let m = value.first().map_or(0, CliffordElement::m);
        let n = value.len();
        let mut s = StemSeries::new(m, n, 0);
        s.add_term(vec![0; n], value)?;
        Ok(s)
    }

    pub fn with_tail(mut self, tail: TailModel) -> Self {
        self.tail = tail;
        self
    }

    /// Adds `z^k a` to the series, accumulating onto an existing term.
    pub fn add_term(&mut self, k: Vec<u32>, a: Vec<CliffordElement>) -> Result<()> {
        if k.len() != self.n || a.len() != self.n {
            return Err(Error::Dimension(format!(
                "term needs {} exponents and {} coefficients",
                self.n, self.n
            )));
        }
        if a.iter().any(|c| c.m() != self.m) {
            return Err(Error::Dimension(format!("coefficients must lie in R_{}", self.m)));
        }
        match self.terms.get_mut(&k) {
            Some(existing) => {
                for (e, c) in existing.iter_mut().zip(&a) {
                    e.add_scaled(c, 1.0);
                }
            }
            None => {
                self.terms.insert(k, a);
            }
        }
        Ok(())
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn tail(&self) -> TailModel {
        self.tail
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], &[CliffordElement])> {
        self.terms.iter().map(|(k, a)| (k.as_slice(), a.as_slice()))
    }

    pub fn coefficient(&self, k: &[u32]) -> Option<&[CliffordElement]> {
        self.terms.get(k).map(Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest total degree present.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|k| k.iter().sum()).max().unwrap_or(0)
    }

    /// Complex monomial values `z^k` for every stored multi-index.
    fn monomials(&self, alpha: &[f64], beta: &[f64]) -> Vec<Complex64> {
        let mut max_exp = vec![0u32; self.n];
        for k in self.terms.keys() {
            for (mx, &e) in max_exp.iter_mut().zip(k) {
                *mx = (*mx).max(e);
            }
        }
        let powers: Vec<Vec<Complex64>> = (0..self.n)
            .map(|t| {
                let z = Complex64::new(alpha[t], beta[t]);
                let mut p = Vec::with_capacity(max_exp[t] as usize + 1);
                let mut acc = Complex64::new(1.0, 0.0);
                p.push(acc);
                for _ in 0..max_exp[t] {
                    acc *= z;
                    p.push(acc);
                }
                p
            })
            .collect();
        self.terms
            .keys()
            .map(|k| {
                k.iter()
                    .enumerate()
                    .fold(Complex64::new(1.0, 0.0), |acc, (t, &e)| acc * powers[t][e as usize])
            })
            .collect()
    }

    /// Formal partial derivative `∂F/∂z_t`.
    pub fn derivative(&self, t: usize) -> StemSeries {
        let mut out = StemSeries::new(self.m, self.n, self.truncation.saturating_sub(1));
        out.tail = self.tail.derivative();
        for (k, a) in &self.terms {
            if k[t] == 0 {
                continue;
            }
            let factor = f64::from(k[t]);
            let mut k2 = k.clone();
            k2[t] -= 1;
            let a2 = a.iter().map(|c| c.scale(factor)).collect();
            out.add_term(k2, a2).expect("same shape");
        }
        out
    }
}

impl Stem for StemSeries {
    fn m(&self) -> usize {
        self.m
    }

    fn n(&self) -> usize {
        self.n
    }

    fn eval_stem(&self, alpha: &[f64], beta: &[f64]) -> (Vec<CliffordElement>, Vec<CliffordElement>) {
        assert_eq!(alpha.len(), self.n, "stem expects {} variables", self.n);
        assert_eq!(beta.len(), self.n, "stem expects {} variables", self.n);
        let mut f1 = vec![CliffordElement::zero(self.m); self.n];
        let mut f2 = vec![CliffordElement::zero(self.m); self.n];
        let mono = self.monomials(alpha, beta);
        for (zk, a) in mono.iter().zip(self.terms.values()) {
            for (t, c) in a.iter().enumerate() {
                f1[t].add_scaled(c, zk.re);
                f2[t].add_scaled(c, zk.im);
            }
        }
        (f1, f2)
    }
}

/// Free-function form of [`Stem::eval_stem`].
pub fn eval_stem<S: Stem + ?Sized>(
    f: &S,
    alpha: &[f64],
    beta: &[f64],
) -> (Vec<CliffordElement>, Vec<CliffordElement>) {
    f.eval_stem(alpha, beta)
}

pub fn stem_derivative(f: &StemSeries, t: usize) -> StemSeries {
    f.derivative(t)
}

type StemFn = dyn Fn(&[f64], &[f64]) -> (Vec<CliffordElement>, Vec<CliffordElement>) + Send + Sync;

/// A stem given directly as an `(F_1, F_2)` pair, not necessarily holomorphic.
pub struct RawStem {
    m: usize,
    n: usize,
    f: Box<StemFn>,
}

impl RawStem {
    pub fn new<F>(m: usize, n: usize, f: F) -> Self
    where
        F: Fn(&[f64], &[f64]) -> (Vec<CliffordElement>, Vec<CliffordElement>) + Send + Sync + 'static,
    {
        RawStem {
            m,
            n,
            f: Box::new(f),
        }
    }

    /// `F_1(z) = (Re z_1, 0, …)`, `F_2 = 0`: an even-odd pair that is not holomorphic.
    pub fn real_part(m: usize, n: usize) -> Self {
        RawStem::new(m, n, move |alpha, _beta| {
            let mut f1 = vec![CliffordElement::zero(m); n];
            f1[0] = CliffordElement::scalar(m, alpha[0]);
            (f1, vec![CliffordElement::zero(m); n])
        })
    }
}

impl Stem for RawStem {
    fn m(&self) -> usize {
        self.m
    }

    fn n(&self) -> usize {
        self.n
    }

    fn eval_stem(&self, alpha: &[f64], beta: &[f64]) -> (Vec<CliffordElement>, Vec<CliffordElement>) {
        (self.f)(alpha, beta)
    }
}

/// Largest modulus of `∂F/∂z̄_t` over variables and components, by central
/// differences with the given step.
pub fn cr_residual<S: Stem + ?Sized>(f: &S, alpha: &[f64], beta: &[f64], step: f64) -> f64 {
    let n = f.n();
    let mut worst = 0.0f64;
    for t in 0..n {
        let partial = |da: f64, db: f64| {
            let mut a = alpha.to_vec();
            let mut b = beta.to_vec();
            a[t] += da;
            b[t] += db;
            f.eval_stem(&a, &b)
        };
        let (a_plus1, a_plus2) = partial(step, 0.0);
        let (a_minus1, a_minus2) = partial(-step, 0.0);
        let (b_plus1, b_plus2) = partial(0.0, step);
        let (b_minus1, b_minus2) = partial(0.0, -step);
        let h = 2.0 * step;
        for c in 0..n {
            let d1a = (&a_plus1[c] - &a_minus1[c]).scale(1.0 / h);
            let d2a = (&a_plus2[c] - &a_minus2[c]).scale(1.0 / h);
            let d1b = (&b_plus1[c] - &b_minus1[c]).scale(1.0 / h);
            let d2b = (&b_plus2[c] - &b_minus2[c]).scale(1.0 / h);
            // ∂F/∂z̄ = ½(∂_α F + i ∂_β F)
            let re = (&d1a - &d2b).scale(0.5);
            let im = (&d2a + &d1b).scale(0.5);
            worst = worst.max((re.modulus_sq() + im.modulus_sq()).sqrt());
        }
    }
    worst
}

/// A one-variable series `Σ_k x^k a_k` with Clifford coefficients.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnivariateSeries {
    m: usize,
    coeffs: Vec<CliffordElement>,
}

impl UnivariateSeries {
    pub fn new(m: usize, coeffs: Vec<CliffordElement>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Dimension("series needs at least a constant term".into()));
        }
        if coeffs.iter().any(|c| c.m() != m) {
            return Err(Error::Dimension(format!("coefficients must lie in R_{m}")));
        }
        Ok(UnivariateSeries { m, coeffs })
    }

    pub fn constant(c: CliffordElement) -> Self {
        UnivariateSeries {
            m: c.m(),
            coeffs: vec![c],
        }
    }

    pub fn one(m: usize) -> Self {
        Self::constant(CliffordElement::one(m))
    }

    /// `x`.
    pub fn x(m: usize) -> Self {
        UnivariateSeries {
            m,
            coeffs: vec![CliffordElement::zero(m), CliffordElement::one(m)],
        }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Truncation degree `N`.
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[CliffordElement] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> CliffordElement {
        self.coeffs
            .get(k)
            .cloned()
            .unwrap_or_else(|| CliffordElement::zero(self.m))
    }

    pub fn truncate(mut self, n: usize) -> Self {
        self.coeffs.truncate(n + 1);
        self
    }

    pub fn add(&self, other: &Self) -> Self {
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..len).map(|k| &self.coeff(k) + &other.coeff(k)).collect();
        UnivariateSeries { m: self.m, coeffs }
    }

    /// `x · f`.
    pub fn shift(&self) -> Self {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(CliffordElement::zero(self.m));
        coeffs.extend(self.coeffs.iter().cloned());
        UnivariateSeries { m: self.m, coeffs }
    }

    /// Formal derivative.
    pub fn derivative(&self) -> Self {
        if self.coeffs.len() == 1 {
            return UnivariateSeries::constant(CliffordElement::zero(self.m));
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c.scale(k as f64))
            .collect();
        UnivariateSeries { m: self.m, coeffs }
    }

    /// Places this series in component `t` of an `n`-variable stem,
    /// as `F_t(z) = Σ_k z_t^k a_k`.
    pub fn into_component(&self, n: usize, t: usize, stem: &mut StemSeries) -> Result<()> {
        for (d, c) in self.coeffs.iter().enumerate() {
            if c.max_abs() == 0.0 {
                continue;
            }
            let mut k = vec![0u32; n];
            k[t] = d as u32;
            let mut a = vec![CliffordElement::zero(self.m); n];
            a[t] = c.clone();
            stem.add_term(k, a)?;
        }
        Ok(())
    }
}

/// Cauchy product `c_k = Σ_j a_j b_{k-j}`, keeping degrees up to `N_f + N_g`.
pub fn star_mul(f: &UnivariateSeries, g: &UnivariateSeries) -> Result<UnivariateSeries> {
    star_mul_to(f, g, f.degree() + g.degree())
}

/// Cauchy product truncated at degree `min(N_f + N_g, cap)`.
pub fn star_mul_to(f: &UnivariateSeries, g: &UnivariateSeries, cap: usize) -> Result<UnivariateSeries> {
    if f.m != g.m {
        return Err(Error::Dimension(format!("R_{} vs R_{}", f.m, g.m)));
    }
    let top = cap.min(f.degree() + g.degree());
    let mut coeffs = vec![CliffordElement::zero(f.m); top + 1];
    for (i, a) in f.coeffs.iter().enumerate().take(top + 1) {
        if a.max_abs() == 0.0 {
            continue;
        }
        for (j, b) in g.coeffs.iter().enumerate().take(top + 1 - i) {
            let p = a.try_mul(b)?;
            coeffs[i + j].add_scaled(&p, 1.0);
        }
    }
    Ok(UnivariateSeries { m: f.m, coeffs })
}

/// `*`-inverse through degree `N`: `f * g = 1 + O(x^{N+1})`.
pub fn star_inverse(f: &UnivariateSeries, n: usize) -> Result<UnivariateSeries> {
    let a0_inv = f.coeffs[0].invert(DEFAULT_TOL)?;
    let mut b: Vec<CliffordElement> = Vec::with_capacity(n + 1);
    b.push(a0_inv.clone());
    for k in 1..=n {
        let mut acc = CliffordElement::zero(f.m);
        for j in 1..=k.min(f.degree()) {
            acc.add_scaled(&(&f.coeffs[j] * &b[k - j]), 1.0);
        }
        b.push(-(&a0_inv * &acc));
    }
    Ok(UnivariateSeries { m: f.m, coeffs: b })
}

/// `1 - x e^{Iθ}`.
fn one_minus_rotated_x(theta: f64, i: &CliffordElement) -> UnivariateSeries {
    let m = i.m();
    UnivariateSeries {
        m,
        coeffs: vec![CliffordElement::one(m), -CliffordElement::exp_unit(i, theta)],
    }
}

fn check_unit(i: &CliffordElement) -> Result<()> {
    if i.m() == 0 || !i.in_sqrt_minus_one(DEFAULT_TOL) {
        return Err(Error::NotImaginaryUnit(i.to_string()));
    }
    Ok(())
}

/// One component of the Koebe-type map, `x (1 - x e^{Iθ})^{-*2}`, through degree `N`.
pub fn koebe_component(theta: f64, i: &CliffordElement, truncation: usize) -> Result<UnivariateSeries> {
    check_unit(i)?;
    let n = truncation.max(1);
    let inv = star_inverse(&one_minus_rotated_x(theta, i), n - 1)?;
    let inv2 = star_mul_to(&inv, &inv, n - 1)?;
    Ok(inv2.shift())
}

/// One component of the Cayley-type map, `x (1 - x e^{Iθ})^{-*1}`, through degree `N`.
pub fn cayley_component(theta: f64, i: &CliffordElement, truncation: usize) -> Result<UnivariateSeries> {
    check_unit(i)?;
    let n = truncation.max(1);
    Ok(star_inverse(&one_minus_rotated_x(theta, i), n - 1)?.shift())
}

/// The polynomial `x (1 - x e^{Iθ})`.
pub fn paper_example_component(theta: f64, i: &CliffordElement) -> Result<UnivariateSeries> {
    check_unit(i)?;
    star_mul(&UnivariateSeries::x(i.m()), &one_minus_rotated_x(theta, i))
}

fn componentwise(
    component: &UnivariateSeries,
    n: usize,
    truncation: usize,
    tail: TailModel,
) -> Result<StemSeries> {
    let mut stem = StemSeries::new(component.m(), n, truncation).with_tail(tail);
    for t in 0..n {
        component.into_component(n, t, &mut stem)?;
    }
    Ok(stem)
}

/// `f(x) = (x_1 (1 - x_1 e^{Iθ})^{-*2}, …, x_n (1 - x_n e^{Iθ})^{-*2})`.
pub fn koebe_map(theta: f64, i: &CliffordElement, truncation: usize, n: usize) -> Result<StemSeries> {
    let c = koebe_component(theta, i, truncation)?;
    componentwise(&c, n, truncation, TailModel::KOEBE)
}

/// Which convex-family test map to build.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConvexVariant {
    /// `x (1 - x e^{Iθ})^{-*1}`.
    Cayley,
    /// The polynomial `x (1 - x e^{Iθ})`.
    PaperExample,
}

pub fn convex_test_map(
    theta: f64,
    i: &CliffordElement,
    truncation: usize,
    n: usize,
    variant: ConvexVariant,
) -> Result<StemSeries> {
    match variant {
        ConvexVariant::Cayley => {
            let c = cayley_component(theta, i, truncation)?;
            componentwise(&c, n, truncation, TailModel::GEOMETRIC)
        }
        ConvexVariant::PaperExample => {
            let c = paper_example_component(theta, i)?;
            componentwise(&c, n, 2, TailModel::Exact)
        }
    }
}

/// `Σ_{d > N} (d + shift)^power r^d`.
fn power_law_tail(power: u32, shift: u32, truncation: usize, r: f64) -> f64 {
    let m = truncation as f64 + 1.0;
    match (power, shift) {
        (0, 0) => r.powf(m) / (1.0 - r),
        (1, 0) => r.powf(m) * (m - (m - 1.0) * r) / (1.0 - r).powi(2),
        _ => {
            let mut sum = 0.0;
            let mut d = truncation + 1;
            loop {
                let term = (d as f64 + f64::from(shift)).powi(power as i32) * r.powi(d as i32);
                sum += term;
                if term <= sum * 1e-17 || term == 0.0 {
                    break;
                }
                d += 1;
            }
            sum
        }
    }
}

/// Bound on `‖F(z) - F_N(z)‖` for `‖z‖ ≤ r < 1`; zero for exact series.
pub fn tail_bound(f: &StemSeries, r: f64) -> f64 {
    match f.tail {
        TailModel::Exact => 0.0,
        TailModel::PowerLaw { power, shift } => {
            if r >= 1.0 {
                f64::INFINITY
            } else {
                power_law_tail(power, shift, f.truncation, r)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(m: usize, idx: &[usize]) -> CliffordElement {
        CliffordElement::blade(m, idx).unwrap()
    }

    fn max_diff(a: &[CliffordElement], b: &[CliffordElement]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).max_abs()).fold(0.0, f64::max)
    }

    #[test]
    fn linear_stem_at_i() {
        let m = 2;
        let c = e(m, &[2]);
        let mut s = StemSeries::new(m, 2, 1);
        s.add_term(vec![1, 0], vec![c.clone(), CliffordElement::zero(m)]).unwrap();
        let (f1, f2) = s.eval_stem(&[0.0, 0.0], &[1.0, 0.0]);
        assert_eq!(f1, vec![CliffordElement::zero(m); 2]);
        assert_eq!(f2, vec![c, CliffordElement::zero(m)]);
    }

    #[test]
    fn square_at_i() {
        let m = 1;
        let a = e(m, &[1]);
        let mut s = StemSeries::new(m, 1, 2);
        s.add_term(vec![2], vec![a.clone()]).unwrap();
        let (f1, f2) = s.eval_stem(&[0.0], &[1.0]);
        assert_eq!(f1, vec![-a]);
        assert_eq!(f2, vec![CliffordElement::zero(m)]);
    }

    #[test]
    fn derivative_examples() {
        let m = 2;
        let id = StemSeries::identity(m, 1);
        let d = id.derivative(0);
        assert_eq!(d.coefficient(&[0]).unwrap(), &[CliffordElement::one(m)]);

        let a = e(m, &[1, 2]);
        let mut sq = StemSeries::new(m, 1, 2);
        sq.add_term(vec![2], vec![a.clone()]).unwrap();
        let d = sq.derivative(0);
        assert_eq!(d.len(), 1);
        assert_eq!(d.coefficient(&[1]).unwrap(), &[a.scale(2.0)]);
    }

    #[test]
    fn cr_residual_of_raw_real_part() {
        let f = RawStem::real_part(2, 1);
        let r = cr_residual(&f, &[0.3], &[-0.2], 1e-5);
        assert!((r - 0.5).abs() < 1e-9, "{r}");
    }

    #[test]
    fn cr_residual_of_constant() {
        let f = StemSeries::constant(vec![e(2, &[1]), CliffordElement::one(2)]).unwrap();
        assert!(cr_residual(&f, &[0.3, 0.1], &[0.2, -0.4], 1e-5) <= 1e-14);
    }

    #[test]
    fn unit_series_is_identity_for_star() {
        let m = 2;
        let g = UnivariateSeries::new(m, vec![e(m, &[1]), e(m, &[2]), e(m, &[1, 2])]).unwrap();
        assert_eq!(star_mul(&UnivariateSeries::one(m), &g).unwrap(), g);
        assert_eq!(star_mul(&g, &UnivariateSeries::one(m)).unwrap(), g);
    }

    #[test]
    fn geometric_series_telescopes() {
        let m = 2;
        let e1 = e(m, &[1]);
        let n = 12;
        let mut pow = CliffordElement::one(m);
        let mut geo = Vec::new();
        for _ in 0..=n {
            geo.push(pow.clone());
            pow = &pow * &e1;
        }
        let geo = UnivariateSeries::new(m, geo).unwrap();
        let f = UnivariateSeries::new(m, vec![CliffordElement::one(m), -e1]).unwrap();
        let p = star_mul_to(&f, &geo, n).unwrap();
        assert_eq!(p.coeff(0), CliffordElement::one(m));
        for k in 1..=n {
            assert!(p.coeff(k).max_abs() < 1e-15, "k = {k}");
        }
    }

    #[test]
    fn star_inverse_closed_form() {
        let m = 3;
        let i = e(m, &[2]);
        let theta = 0.7;
        let f = one_minus_rotated_x(theta, &i);
        let inv = star_inverse(&f, 40).unwrap();
        for k in 0..=40 {
            let expect = CliffordElement::exp_unit(&i, k as f64 * theta);
            assert!((&inv.coeff(k) - &expect).max_abs() < 1e-12, "k = {k}");
        }
        let two = UnivariateSeries::constant(CliffordElement::scalar(m, 2.0));
        assert_eq!(star_inverse(&two, 0).unwrap().coeff(0), CliffordElement::scalar(m, 0.5));
    }

    #[test]
    fn star_inverse_needs_invertible_constant() {
        let m = 3;
        let zd = UnivariateSeries::constant(CliffordElement::one(m) + e(m, &[1, 2, 3]));
        assert!(matches!(star_inverse(&zd, 3), Err(Error::NotInvertible { .. })));
    }

    #[test]
    fn koebe_coefficients_at_theta_zero() {
        let m = 2;
        let c = koebe_component(0.0, &e(m, &[1]), 50).unwrap();
        assert_eq!(c.degree(), 50);
        assert_eq!(c.coeff(0), CliffordElement::zero(m));
        for d in 1..=50 {
            assert!((&c.coeff(d) - &CliffordElement::scalar(m, d as f64)).max_abs() < 1e-12);
        }
    }

    #[test]
    fn koebe_map_normalization() {
        let m = 3;
        let i = e(m, &[1, 2]);
        let f = koebe_map(0.4, &i, 30, 2).unwrap();
        assert!(f.coefficient(&[0, 0]).is_none());
        assert_eq!(
            f.coefficient(&[1, 0]).unwrap(),
            &[CliffordElement::one(m), CliffordElement::zero(m)]
        );
        assert_eq!(
            f.coefficient(&[0, 1]).unwrap(),
            &[CliffordElement::zero(m), CliffordElement::one(m)]
        );
        // |a_d| = d
        for d in 1..=30u32 {
            let a = &f.coefficient(&[d, 0]).unwrap()[0];
            assert!((a.modulus() - f64::from(d)).abs() < 1e-10);
        }
    }

    #[test]
    fn convex_variants() {
        let m = 2;
        let i = e(m, &[1]);
        let p = convex_test_map(0.0, &i, 300, 2, ConvexVariant::PaperExample).unwrap();
        assert_eq!(p.coefficient(&[1, 0]).unwrap()[0], CliffordElement::one(m));
        assert_eq!(p.coefficient(&[2, 0]).unwrap()[0], CliffordElement::scalar(m, -1.0));
        assert_eq!(p.degree(), 2);
        let c = convex_test_map(0.0, &i, 300, 2, ConvexVariant::Cayley).unwrap();
        assert_eq!(c.coefficient(&[1, 0]).unwrap()[0], CliffordElement::one(m));
        assert_eq!(c.coefficient(&[0, 1]).unwrap()[1], CliffordElement::one(m));
        for v in [ConvexVariant::Cayley, ConvexVariant::PaperExample] {
            let f = convex_test_map(0.3, &i, 20, 2, v).unwrap();
            let (f1, f2) = f.eval_stem(&[0.0, 0.0], &[0.0, 0.0]);
            assert_eq!(max_diff(&f1, &f2), 0.0);
            assert!(f1.iter().all(|c| c.max_abs() == 0.0));
        }
    }

    #[test]
    fn rejects_non_unit_direction() {
        assert!(koebe_map(0.0, &CliffordElement::one(2), 10, 1).is_err());
    }

    #[test]
    fn tail_bounds() {
        let m = 2;
        let i = e(m, &[1]);
        let k = koebe_map(0.0, &i, 300, 2).unwrap();
        assert!(tail_bound(&k, 0.9) < 1e-9);
        let id = StemSeries::identity(m, 2);
        assert_eq!(tail_bound(&id, 0.9), 0.0);
        // closed form against direct summation
        for (power, shift) in [(0, 0), (1, 0)] {
            for n in [5usize, 40, 300] {
                let closed = power_law_tail(power, shift, n, 0.9);
                let direct: f64 = (n + 1..20_000)
                    .map(|d| (d as f64 + shift as f64).powi(power as i32) * 0.9f64.powi(d as i32))
                    .sum();
                assert!((closed - direct).abs() <= 1e-12 * direct.max(1e-300) + 1e-300, "{closed} {direct}");
            }
        }
    }

    #[test]
    fn series_json_shape() {
        let m = 1;
        let s = StemSeries::identity(m, 1);
        let j = serde_json::to_string(&s).unwrap();
        assert_eq!(j, r#"{"m":1,"n":1,"N":1,"terms":[{"k":[1],"a":[{"m":1,"coeffs":[1.0,0.0]}]}]}"#);
        let back: StemSeries = serde_json::from_str(&j).unwrap();
        assert_eq!(back, s);
        let k = koebe_map(0.0, &e(m, &[1]), 3, 1).unwrap();
        let back: StemSeries = serde_json::from_str(&serde_json::to_string(&k).unwrap()).unwrap();
        assert_eq!(back, k);
    }
}

#[cfg(test)]
mod props {
    use super::*;
    use proptest::prelude::*;

    fn series(m: usize, len: usize) -> impl Strategy<Value = UnivariateSeries> {
        prop::collection::vec(prop::collection::vec(-1.0..1.0f64, 1 << m), len).prop_map(move |cs| {
            let coeffs = cs.into_iter().map(|c| CliffordElement::from_coeffs(m, c).unwrap()).collect();
            UnivariateSeries::new(m, coeffs).unwrap()
        })
    }

    fn truncate(f: &UnivariateSeries, deg: usize) -> Vec<CliffordElement> {
        let mut c = f.coeffs().to_vec();
        c.resize(deg + 1, CliffordElement::zero(f.m));
        c.truncate(deg + 1);
        c
    }

    fn close(a: &[CliffordElement], b: &[CliffordElement], tol: f64) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).max_abs() <= tol)
    }

    proptest! {
        #[test]
        fn star_product_is_associative(
            (f, g, h) in (1usize..=3).prop_flat_map(|m| (series(m, 4), series(m, 3), series(m, 5)))
        ) {
            let lhs = star_mul(&star_mul(&f, &g).unwrap(), &h).unwrap();
            let rhs = star_mul(&f, &star_mul(&g, &h).unwrap()).unwrap();
            prop_assert!(close(lhs.coeffs(), rhs.coeffs(), 1e-12));
        }

        #[test]
        fn star_inverse_twice_is_identity(
            (m, f) in (1usize..=3).prop_flat_map(|m| (Just(m), series(m, 4))),
        ) {
            // push the constant term away from zero so it stays invertible
            let mut coeffs = f.coeffs().to_vec();
            coeffs[0] = coeffs[0].scale(0.25).add_scalar(2.0);
            let f = UnivariateSeries::new(m, coeffs).unwrap();
            let deg = 8;
            let g = star_inverse(&f, deg).unwrap();
            let one = star_mul_to(&f, &g, deg).unwrap();
            let mut expect = vec![CliffordElement::zero(m); deg + 1];
            expect[0] = CliffordElement::one(m);
            prop_assert!(close(&truncate(&one, deg), &expect, 1e-10));
            let back = star_inverse(&g, deg).unwrap();
            prop_assert!(close(&truncate(&back, deg), &truncate(&f, deg), 1e-9));
        }
    }
}
