//! Points of the slice cone `(Q_m)^n_s` in slice coordinates `x = α + βJ`.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::clifford::{CliffordElement, DEFAULT_TOL};
use crate::error::{Error, Result};

/// Default tolerance for slice compatibility in [`decompose`].
pub const SLICE_TOL: f64 = 1e-9;

/// Default retry budget for [`SamplingStrategy::Rejection`].
pub const REJECTION_BUDGET: usize = 10_000;

/// Threshold below which a coefficient counts as zero for canonicalization.
const CANON_EPS: f64 = 1e-12;

/// A point `α + βJ` with `α, β ∈ R^n` and `J ∈ S_m`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlicePoint {
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    #[serde(rename = "J")]
    pub j: CliffordElement,
}

fn canonical_unit(m: usize) -> CliffordElement {
    CliffordElement::generator(m, 1)
}

fn leading_sign(j: &CliffordElement) -> f64 {
    j.coeffs()
        .iter()
        .find(|c| c.abs() > CANON_EPS)
        .map_or(1.0, |c| c.signum())
}

impl SlicePoint {
    /// Validates `J ∈ S_m` and returns the canonical representative.
    pub fn new(alpha: Vec<f64>, beta: Vec<f64>, j: CliffordElement) -> Result<Self> {
        Ok(Self::new_raw(alpha, beta, j)?.canonical())
    }

    /// Validates without canonicalizing, so `(β, J)` and `(-β, -J)` stay distinct.
    pub fn new_raw(alpha: Vec<f64>, beta: Vec<f64>, j: CliffordElement) -> Result<Self> {
        if alpha.len() != beta.len() {
            return Err(Error::Dimension(format!(
                "alpha has {} entries, beta has {}",
                alpha.len(),
                beta.len()
            )));
        }
        if j.m() == 0 || !j.in_sqrt_minus_one(DEFAULT_TOL) {
            return Err(Error::NotImaginaryUnit(j.to_string()));
        }
        Ok(SlicePoint { alpha, beta, j })
    }

    /// A real point (`β = 0`) of `(R_m)^n`.
    pub fn real(m: usize, alpha: Vec<f64>) -> Self {
        let n = alpha.len();
        SlicePoint {
            alpha,
            beta: vec![0.0; n],
            j: canonical_unit(m),
        }
    }

    pub fn m(&self) -> usize {
        self.j.m()
    }

    pub fn n(&self) -> usize {
        self.alpha.len()
    }

    pub fn is_real(&self) -> bool {
        self.beta.iter().all(|&b| b == 0.0)
    }

    /// Real points use `J = e_1`; otherwise the first nonzero coefficient
    /// of `J` is made positive, absorbing the sign into `β`.
    pub fn canonical(mut self) -> Self {
        if self.is_real() {
            self.j = canonical_unit(self.m());
            return self;
        }
        if leading_sign(&self.j) < 0.0 {
            self.j = -self.j;
            for b in &mut self.beta {
                *b = -*b;
            }
        }
        self
    }

    /// The complex point `α + iβ` of the stem domain.
    pub fn stem_coords(&self) -> (&[f64], &[f64]) {
        (&self.alpha, &self.beta)
    }
}

/// Componentwise `x_t = α_t + β_t J`.
pub fn embed(p: &SlicePoint) -> Vec<CliffordElement> {
    p.alpha
        .iter()
        .zip(&p.beta)
        .map(|(&a, &b)| p.j.scale(b).add_scalar(a))
        .collect()
}

/// Recovers `(α, β, J)` from raw components sharing one slice.
pub fn decompose(x: &[CliffordElement], tol: f64) -> Result<SlicePoint> {
    let m = match x.first() {
        Some(c) => c.m(),
        None => return Err(Error::Dimension("empty point".into())),
    };
    if x.iter().any(|c| c.m() != m) {
        return Err(Error::Dimension("components have different m".into()));
    }
    for c in x {
        if !c.in_quadratic_cone(tol) {
            return Err(Error::NotInCone);
        }
    }
    let imag: Vec<CliffordElement> = x
        .iter()
        .map(|c| {
            let mut v = c.clone();
            v.set_coeff(Default::default(), 0.0);
            v
        })
        .collect();
    let (pivot, pivot_mod) = imag
        .iter()
        .map(CliffordElement::modulus)
        .enumerate()
        .fold((0, 0.0), |best, (i, r)| if r > best.1 { (i, r) } else { best });
    let alpha: Vec<f64> = x.iter().map(CliffordElement::scalar_part).collect();
    if pivot_mod <= tol {
        return Ok(SlicePoint::real(m, alpha));
    }
    let j = imag[pivot].scale(1.0 / pivot_mod);
    if !j.in_sqrt_minus_one(tol.max(DEFAULT_TOL) * 10.0) {
        return Err(Error::NotInCone);
    }
    decompose_on(x, &j, tol)
}

/// Projects components onto a known slice `C_J`, checking compatibility.
pub fn decompose_on(x: &[CliffordElement], j: &CliffordElement, tol: f64) -> Result<SlicePoint> {
    let mut alpha = Vec::with_capacity(x.len());
    let mut beta = Vec::with_capacity(x.len());
    for c in x {
        if c.m() != j.m() {
            return Err(Error::Dimension("component and J differ in m".into()));
        }
        let a = c.scalar_part();
        let mut v = c.clone();
        v.set_coeff(Default::default(), 0.0);
        let b = v.dot(j);
        let mut resid = v;
        resid.add_scaled(j, -b);
        if resid.modulus() > tol * c.modulus().max(1.0) {
            return Err(Error::NotInSlice);
        }
        alpha.push(a);
        beta.push(b);
    }
    let p = SlicePoint {
        alpha,
        beta,
        j: j.clone(),
    };
    Ok(p.canonical())
}

/// `‖x‖ = sqrt(Σ_t α_t² + β_t²)`.
pub fn point_norm(p: &SlicePoint) -> f64 {
    p.alpha
        .iter()
        .zip(&p.beta)
        .map(|(a, b)| a * a + b * b)
        .sum::<f64>()
        .sqrt()
}

/// The orbit `[z] = ⋃_{J ∈ S_m} α + βJ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SliceOrbit {
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
}

impl SliceOrbit {
    pub fn new(alpha: Vec<f64>, mut beta: Vec<f64>) -> Result<Self> {
        if alpha.len() != beta.len() {
            return Err(Error::Dimension("alpha and beta lengths differ".into()));
        }
        let lead = beta.iter().find(|b| b.abs() > 0.0).copied().unwrap_or(0.0);
        if lead < 0.0 {
            beta.iter_mut().for_each(|b| *b = -*b);
        }
        Ok(SliceOrbit { alpha, beta })
    }

    pub fn of_point(p: &SlicePoint) -> Self {
        SliceOrbit::new(p.alpha.clone(), p.beta.clone()).expect("matching lengths")
    }

    pub fn n(&self) -> usize {
        self.alpha.len()
    }
}

/// The representative `α + βJ` of `[z]` on `C_J^n`.
pub fn orbit_point(o: &SliceOrbit, j: &CliffordElement) -> Result<SlicePoint> {
    SlicePoint::new(o.alpha.clone(), o.beta.clone(), j.clone())
}

/// Like [`orbit_point`] but keeps the given `J` even when it is not canonical.
pub fn orbit_point_raw(o: &SliceOrbit, j: &CliffordElement) -> Result<SlicePoint> {
    SlicePoint::new_raw(o.alpha.clone(), o.beta.clone(), j.clone())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SamplingStrategy {
    /// Uniform unit vector in `span(e_1, …, e_m)`.
    #[default]
    Vector,
    /// Random sparse trace-free element, accepted iff it lies in `S_m`.
    Rejection,
}

/// Draws an element of `S_m`.
pub fn sample_s<R: Rng + ?Sized>(
    rng: &mut R,
    m: usize,
    strategy: SamplingStrategy,
) -> Result<CliffordElement> {
    match strategy {
        SamplingStrategy::Vector => Ok(sample_vector(rng, m)),
        SamplingStrategy::Rejection => sample_rejection(rng, m, REJECTION_BUDGET),
    }
}

fn sample_vector<R: Rng + ?Sized>(rng: &mut R, m: usize) -> CliffordElement {
    loop {
        let mut x = CliffordElement::zero(m);
        let mut c = x.coeffs().to_vec();
        for i in 0..m {
            c[1 << i] = rng.sample(StandardNormal);
        }
        x = CliffordElement::from_coeffs(m, c).expect("length 2^m");
        let r = x.modulus();
        if r > 1e-8 {
            return x.scale(1.0 / r);
        }
    }
}

/// Rejection sampler over sparse supports of trace-free blades.
pub fn sample_rejection<R: Rng + ?Sized>(
    rng: &mut R,
    m: usize,
    budget: usize,
) -> Result<CliffordElement> {
    let trace_free: Vec<usize> = (1..1usize << m)
        .filter(|i| matches!(i.count_ones() % 4, 1 | 2))
        .collect();
    if trace_free.is_empty() {
        return Err(Error::Sampling(0));
    }
    for _ in 0..budget {
        let support = rng.random_range(1..=trace_free.len().min(3));
        let mut c = vec![0.0; 1 << m];
        for _ in 0..support {
            let blade = trace_free[rng.random_range(0..trace_free.len())];
            c[blade] += rng.sample::<f64, _>(StandardNormal);
        }
        let x = CliffordElement::from_coeffs(m, c).expect("length 2^m");
        let x = &x - &x.trace().scale(0.5);
        let r = x.modulus();
        if r < 1e-8 {
            continue;
        }
        let x = x.scale(1.0 / r);
        if x.in_sqrt_minus_one(DEFAULT_TOL) {
            return Ok(x);
        }
    }
    Err(Error::Sampling(budget))
}

/// Left-multiplies every component by `e^{Jθ} = cos θ + J sin θ`.
pub fn circle_rotate(p: &SlicePoint, theta: f64) -> Result<SlicePoint> {
    let rot = CliffordElement::exp_unit(&p.j, theta);
    let rotated: Vec<CliffordElement> = embed(p).iter().map(|x| &rot * x).collect();
    decompose_on(&rotated, &p.j, SLICE_TOL)
}

/// True when `J` is a unit 1-vector, so `embed(p)` consists of paravectors.
pub fn is_paravector_slice(p: &SlicePoint, tol: f64) -> bool {
    p.j.is_vector(tol)
}
