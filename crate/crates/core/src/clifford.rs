//! Dense arithmetic in the real Clifford algebra `R_m`.
//!
//! `R_m` is generated by `e_1, …, e_m` with `e_i e_j + e_j e_i = -2 δ_ij`.
//! An element is stored as `2^m` real coefficients. The coefficient of the
//! basis blade `e_A = e_{h_1} ⋯ e_{h_r}` (with `h_1 < ⋯ < h_r`) lives at the
//! index whose bit `h - 1` is set for every `h ∈ A`, so `coeffs[0]` is the
//! scalar part and `coeffs[1 << (i - 1)]` is the coefficient of `e_i`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest generator count supported by the dense representation.
pub const MAX_GENERATORS: usize = 8;

/// Default absolute tolerance for scalarness and membership tests.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Largest `m` for which the product uses a precomputed sign table.
const SIGN_TABLE_MAX: usize = 6;

/// A basis blade `e_A`, encoded as a bitmask over the generators.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct BladeIndex(u16);

impl BladeIndex {
    /// The unit blade `e_∅ = 1`.
    pub const SCALAR: BladeIndex = BladeIndex(0);

    /// Builds a blade from strictly increasing 1-based generator indices.
    pub fn from_indices(indices: &[usize]) -> Result<Self> {
        let mut bits = 0u16;
        let mut prev = 0usize;
        for &h in indices {
            if h <= prev || h > MAX_GENERATORS {
                return Err(Error::Dimension(format!(
                    "blade indices must be strictly increasing in 1..={MAX_GENERATORS}, got {indices:?}"
                )));
            }
            bits |= 1 << (h - 1);
            prev = h;
        }
        Ok(BladeIndex(bits))
    }

    pub const fn from_bits(bits: u16) -> Self {
        BladeIndex(bits)
    }

    pub const fn bits(self) -> u16 {
        self.0
    }

    pub const fn grade(self) -> u32 {
        self.0.count_ones()
    }

    /// Generator indices in increasing order (1-based).
    pub fn indices(self) -> Vec<usize> {
        (0..16).filter(|i| self.0 & (1 << i) != 0).map(|i| i + 1).collect()
    }
}

impl fmt::Display for BladeIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 == 0 {
            return write!(f, "1");
        }
        write!(f, "e")?;
        for i in self.indices() {
            write!(f, "{i}")?;
        }
        Ok(())
    }
}

/// Sign of `e_A e_B` in `R_m`, computed by counting transpositions.
///
/// Moving each generator of `B` left past the larger generators of `A`
/// costs one transposition each; every generator shared by `A` and `B`
/// then contracts to `e_i² = -1`.
pub fn blade_sign(a: BladeIndex, b: BladeIndex) -> f64 {
    let (a, b) = (a.0 as u32, b.0 as u32);
    let mut swaps = 0u32;
    let mut rest = b;
    while rest != 0 {
        let j = rest.trailing_zeros();
        swaps += (a >> (j + 1)).count_ones();
        rest &= rest - 1;
    }
    let parity = swaps + (a & b).count_ones();
    if parity.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// `(-1)^{k(k+1)/2}`: the factor Clifford conjugation applies to grade `k`.
pub fn conjugation_sign(grade: u32) -> f64 {
    match grade % 4 {
        0 | 3 => 1.0,
        _ => -1.0,
    }
}

fn sign_table(m: usize) -> &'static [i8] {
    static TABLES: OnceLock<Vec<Vec<i8>>> = OnceLock::new();
    let tables = TABLES.get_or_init(|| {
        (0..=SIGN_TABLE_MAX)
            .map(|m| {
                let d = 1usize << m;
                let mut t = Vec::with_capacity(d * d);
                for a in 0..d {
                    for b in 0..d {
                        let s = blade_sign(BladeIndex(a as u16), BladeIndex(b as u16));
                        t.push(s as i8);
                    }
                }
                t
            })
            .collect()
    });
    &tables[m]
}

/// An element of `R_m` in dense blade coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawElement")]
pub struct CliffordElement {
    m: usize,
    coeffs: Vec<f64>,
}

#[derive(Deserialize)]
struct RawElement {
    m: usize,
    coeffs: Vec<f64>,
}

impl TryFrom<RawElement> for CliffordElement {
    type Error = Error;

    fn try_from(raw: RawElement) -> Result<Self> {
        CliffordElement::from_coeffs(raw.m, raw.coeffs)
    }
}

fn check_m(m: usize) -> Result<()> {
    if m > MAX_GENERATORS {
        Err(Error::TooManyGenerators {
            m,
            cap: MAX_GENERATORS,
        })
    } else {
        Ok(())
    }
}

impl CliffordElement {
    pub fn zero(m: usize) -> Self {
        assert!(m <= MAX_GENERATORS, "m = {m} exceeds {MAX_GENERATORS}");
        CliffordElement {
            m,
            coeffs: vec![0.0; 1 << m],
        }
    }

    pub fn scalar(m: usize, r: f64) -> Self {
        let mut x = Self::zero(m);
        x.coeffs[0] = r;
        x
    }

    pub fn one(m: usize) -> Self {
        Self::scalar(m, 1.0)
    }

    /// The generator `e_i` (1-based).
    pub fn generator(m: usize, i: usize) -> Self {
        assert!((1..=m).contains(&i), "generator e_{i} out of range for m = {m}");
        let mut x = Self::zero(m);
        x.coeffs[1 << (i - 1)] = 1.0;
        x
    }

    /// The basis blade `e_{h_1} ⋯ e_{h_r}` with coefficient 1.
    pub fn blade(m: usize, indices: &[usize]) -> Result<Self> {
        check_m(m)?;
        let b = BladeIndex::from_indices(indices)?;
        if (b.0 as usize) >= (1 << m) {
            return Err(Error::Dimension(format!("blade {b} not in R_{m}")));
        }
        let mut x = Self::zero(m);
        x.coeffs[b.0 as usize] = 1.0;
        Ok(x)
    }

    pub fn from_coeffs(m: usize, coeffs: Vec<f64>) -> Result<Self> {
        check_m(m)?;
        if coeffs.len() != 1 << m {
            return Err(Error::Dimension(format!(
                "R_{m} needs {} coefficients, got {}",
                1usize << m,
                coeffs.len()
            )));
        }
        Ok(CliffordElement { m, coeffs })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    pub fn coeff(&self, blade: BladeIndex) -> f64 {
        self.coeffs.get(blade.0 as usize).copied().unwrap_or(0.0)
    }

    pub fn set_coeff(&mut self, blade: BladeIndex, value: f64) {
        self.coeffs[blade.0 as usize] = value;
    }

    pub fn scalar_part(&self) -> f64 {
        self.coeffs[0]
    }

    /// Largest absolute coefficient outside the scalar slot.
    pub fn non_scalar_max(&self) -> f64 {
        self.coeffs[1..].iter().fold(0.0, |acc, c| acc.max(c.abs()))
    }

    pub fn is_scalar(&self, tol: f64) -> bool {
        self.non_scalar_max() <= tol
    }

    /// The grade-`k` part.
    pub fn grade_part(&self, k: u32) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| if (i as u32).count_ones() == k { c } else { 0.0 })
            .collect();
        CliffordElement { m: self.m, coeffs }
    }

    /// True when only grade-1 coefficients exceed `tol`.
    pub fn is_vector(&self, tol: f64) -> bool {
        self.coeffs
            .iter()
            .enumerate()
            .all(|(i, c)| i.count_ones() == 1 || c.abs() <= tol)
    }

    /// `‖x‖_∞` over coefficients.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |acc, c| acc.max(c.abs()))
    }

    /// Euclidean coefficient norm `sqrt(Σ x_A²)`; equals `sqrt(n(x))` on the
    /// quadratic cone.
    pub fn modulus(&self) -> f64 {
        self.modulus_sq().sqrt()
    }

    pub fn modulus_sq(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum()
    }

    /// Euclidean inner product of coefficient vectors.
    pub fn dot(&self, other: &Self) -> f64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a * b)
            .sum()
    }

    fn same_m(&self, other: &Self) -> Result<()> {
        if self.m != other.m {
            Err(Error::Dimension(format!(
                "R_{} vs R_{}",
                self.m, other.m
            )))
        } else {
            Ok(())
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.same_m(other)?;
        Ok(self.zip_with(other, |a, b| a + b))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.same_m(other)?;
        Ok(self.zip_with(other, |a, b| a - b))
    }

    fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(&a, &b)| f(a, b))
            .collect();
        CliffordElement { m: self.m, coeffs }
    }

    pub fn scale(&self, r: f64) -> Self {
        CliffordElement {
            m: self.m,
            coeffs: self.coeffs.iter().map(|c| c * r).collect(),
        }
    }

    pub fn add_scalar(mut self, r: f64) -> Self {
        self.coeffs[0] += r;
        self
    }

    /// `self += r * other`, in place.
    pub fn add_scaled(&mut self, other: &Self, r: f64) {
        debug_assert_eq!(self.m, other.m);
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += r * b;
        }
    }

    /// The Clifford product.
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.same_m(other)?;
        let d = self.coeffs.len();
        let mut out = vec![0.0; d];
        if self.m <= SIGN_TABLE_MAX {
            let table = sign_table(self.m);
            for (a, &x) in self.coeffs.iter().enumerate() {
                if x == 0.0 {
                    continue;
                }
                let row = &table[a * d..(a + 1) * d];
                for (b, &y) in other.coeffs.iter().enumerate() {
                    if y != 0.0 {
                        out[a ^ b] += f64::from(row[b]) * x * y;
                    }
                }
            }
        } else {
            for (a, &x) in self.coeffs.iter().enumerate() {
                if x == 0.0 {
                    continue;
                }
                for (b, &y) in other.coeffs.iter().enumerate() {
                    if y != 0.0 {
                        let s = blade_sign(BladeIndex(a as u16), BladeIndex(b as u16));
                        out[a ^ b] += s * x * y;
                    }
                }
            }
        }
        Ok(CliffordElement {
            m: self.m,
            coeffs: out,
        })
    }

    /// Clifford conjugate: grade `k` is scaled by `(-1)^{k(k+1)/2}`.
    pub fn conjugate(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| c * conjugation_sign((i as u32).count_ones()))
            .collect();
        CliffordElement { m: self.m, coeffs }
    }

    /// `t(x) = x + x^c`.
    pub fn trace(&self) -> Self {
        self + &self.conjugate()
    }

    /// `n(x) = x x^c`.
    pub fn norm_sq(&self) -> Self {
        self * &self.conjugate()
    }

    /// Membership in the quadratic cone `Q_m`: reals, plus elements whose
    /// trace and norm are real with `4 n(x) > t(x)²`.
    pub fn in_quadratic_cone(&self, tol: f64) -> bool {
        if self.is_scalar(tol) {
            return true;
        }
        let t = self.trace();
        let n = self.norm_sq();
        t.is_scalar(tol) && n.is_scalar(tol) && 4.0 * n.scalar_part() > t.scalar_part().powi(2)
    }

    /// Membership in `S_m`: `t(x) = 0`, `n(x) = 1`, `x ∈ Q_m`.
    pub fn in_sqrt_minus_one(&self, tol: f64) -> bool {
        let t = self.trace();
        if t.max_abs() > tol {
            return false;
        }
        let n = self.norm_sq();
        if !n.is_scalar(tol) || (n.scalar_part() - 1.0).abs() > tol {
            return false;
        }
        self.in_quadratic_cone(tol)
    }

    /// Matrix of `y ↦ x y` in blade coordinates.
    pub fn left_mul_matrix(&self) -> DMatrix<f64> {
        let d = self.coeffs.len();
        let mut mat = DMatrix::zeros(d, d);
        for (a, &x) in self.coeffs.iter().enumerate() {
            if x == 0.0 {
                continue;
            }
            for b in 0..d {
                let s = blade_sign(BladeIndex(a as u16), BladeIndex(b as u16));
                mat[(a ^ b, b)] += s * x;
            }
        }
        mat
    }

    /// Smallest singular value of left multiplication by `self`.
    pub fn left_mul_min_singular(&self) -> f64 {
        self.left_mul_matrix()
            .singular_values()
            .iter()
            .fold(f64::INFINITY, |acc, &s| acc.min(s))
    }

    /// Two-sided inverse.
    ///
    /// Cone elements with real nonzero `n(x)` use `x^c / n(x)`; everything
    /// else solves `L_x y = 1`.
    pub fn invert(&self, tol: f64) -> Result<Self> {
        if self.in_quadratic_cone(tol) {
            let n = self.norm_sq();
            if n.is_scalar(tol) && n.scalar_part().abs() > tol {
                return Ok(self.conjugate().scale(1.0 / n.scalar_part()));
            }
        }
        let mat = self.left_mul_matrix();
        let smin = mat
            .singular_values()
            .iter()
            .fold(f64::INFINITY, |acc, &s| acc.min(s));
        if smin <= tol {
            return Err(Error::NotInvertible { pivot: smin });
        }
        let mut rhs = DVector::zeros(self.coeffs.len());
        rhs[0] = 1.0;
        let y = mat
            .lu()
            .solve(&rhs)
            .ok_or(Error::NotInvertible { pivot: smin })?;
        Ok(CliffordElement {
            m: self.m,
            coeffs: y.iter().copied().collect(),
        })
    }

    /// `cos θ + J sin θ`.
    pub fn exp_unit(j: &Self, theta: f64) -> Self {
        let mut x = j.scale(theta.sin());
        x.coeffs[0] += theta.cos();
        x
    }
}

impl fmt::Display for CliffordElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let b = BladeIndex(i as u16);
            if i == 0 {
                write!(f, "{c}")?;
            } else {
                write!(f, "{c}·{b}")?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Checked arithmetic entry points matching the free-function style.
pub fn multiply(a: &CliffordElement, b: &CliffordElement) -> Result<CliffordElement> {
    a.try_mul(b)
}

pub fn add(a: &CliffordElement, b: &CliffordElement) -> Result<CliffordElement> {
    a.try_add(b)
}

pub fn subtract(a: &CliffordElement, b: &CliffordElement) -> Result<CliffordElement> {
    a.try_sub(b)
}

macro_rules! binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait<&CliffordElement> for &CliffordElement {
            type Output = CliffordElement;

            /// Panics when the generator counts differ.
            fn $method(self, rhs: &CliffordElement) -> CliffordElement {
                self.$checked(rhs).expect("Clifford operands must share m")
            }
        }

        impl $trait<CliffordElement> for CliffordElement {
            type Output = CliffordElement;

            fn $method(self, rhs: CliffordElement) -> CliffordElement {
                (&self).$method(&rhs)
            }
        }
    };
}

binop!(Add, add, try_add);
binop!(Sub, sub, try_sub);
binop!(Mul, mul, try_mul);

impl Neg for &CliffordElement {
    type Output = CliffordElement;

    fn neg(self) -> CliffordElement {
        self.scale(-1.0)
    }
}

impl Neg for CliffordElement {
    type Output = CliffordElement;

    fn neg(self) -> CliffordElement {
        self.scale(-1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(m: usize, idx: &[usize]) -> CliffordElement {
        CliffordElement::blade(m, idx).unwrap()
    }

    #[test]
    fn generator_squares_to_minus_one() {
        let e1 = e(2, &[1]);
        assert_eq!(&e1 * &e1, CliffordElement::scalar(2, -1.0));
    }

    #[test]
    fn disjoint_blades_concatenate() {
        assert_eq!(&e(2, &[1]) * &e(2, &[2]), e(2, &[1, 2]));
        assert_eq!(&e(2, &[2]) * &e(2, &[1]), -e(2, &[1, 2]));
    }

    #[test]
    fn bivector_squares_to_minus_one() {
        let b = e(2, &[1, 2]);
        assert_eq!(&b * &b, CliffordElement::scalar(2, -1.0));
    }

    #[test]
    fn table_agrees_with_transposition_count() {
        // Brute force: multiply generator words one generator at a time.
        fn word_product(a: &[usize], b: &[usize]) -> (f64, Vec<usize>) {
            let mut w: Vec<usize> = a.iter().chain(b).copied().collect();
            let mut sign = 1.0;
            // bubble sort, then cancel adjacent equal pairs
            loop {
                let mut changed = false;
                for i in 0..w.len().saturating_sub(1) {
                    if w[i] > w[i + 1] {
                        w.swap(i, i + 1);
                        sign = -sign;
                        changed = true;
                    } else if w[i] == w[i + 1] {
                        w.drain(i..i + 2);
                        sign = -sign;
                        changed = true;
                        break;
                    }
                }
                if !changed {
                    return (sign, w);
                }
            }
        }
        for a in 0u16..32 {
            for b in 0u16..32 {
                let ba = BladeIndex(a);
                let bb = BladeIndex(b);
                let (s, w) = word_product(&ba.indices(), &bb.indices());
                assert_eq!(BladeIndex::from_indices(&w).unwrap().bits(), a ^ b);
                assert_eq!(blade_sign(ba, bb), s, "{ba} * {bb}");
            }
        }
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let a = CliffordElement::one(2);
        let b = CliffordElement::one(3);
        assert!(matches!(multiply(&a, &b), Err(Error::Dimension(_))));
        assert!(matches!(add(&a, &b), Err(Error::Dimension(_))));
        assert!(CliffordElement::from_coeffs(2, vec![0.0; 3]).is_err());
        assert!(matches!(
            CliffordElement::from_coeffs(9, vec![0.0; 512]),
            Err(Error::TooManyGenerators { .. })
        ));
    }

    #[test]
    fn add_sub_scale() {
        let e1 = e(2, &[1]);
        assert_eq!(&e1 + &e1, e1.scale(2.0));
        assert_eq!(&e1 - &e1, CliffordElement::zero(2));
        assert_eq!(e(2, &[1, 2]).scale(0.0), CliffordElement::zero(2));
    }

    #[test]
    fn conjugate_signs_by_grade() {
        assert_eq!(CliffordElement::one(3).conjugate(), CliffordElement::one(3));
        assert_eq!(e(3, &[1]).conjugate(), -e(3, &[1]));
        assert_eq!(e(3, &[1, 2]).conjugate(), -e(3, &[1, 2]));
        assert_eq!(e(3, &[1, 2, 3]).conjugate(), e(3, &[1, 2, 3]));
    }

    #[test]
    fn trace_and_norm() {
        let m = 2;
        assert_eq!(e(m, &[1]).trace(), CliffordElement::zero(m));
        assert_eq!(CliffordElement::scalar(m, 3.0).trace(), CliffordElement::scalar(m, 6.0));
        let x = CliffordElement::one(m) + e(m, &[1]);
        assert_eq!(x.trace(), CliffordElement::scalar(m, 2.0));
        assert_eq!(e(m, &[1]).norm_sq(), CliffordElement::one(m));
        assert_eq!(CliffordElement::scalar(m, 2.0).norm_sq(), CliffordElement::scalar(m, 4.0));
        assert_eq!(x.norm_sq(), CliffordElement::scalar(m, 2.0));
    }

    #[test]
    fn cone_membership() {
        assert!(CliffordElement::one(3).in_quadratic_cone(DEFAULT_TOL));
        assert!(e(3, &[1]).in_quadratic_cone(DEFAULT_TOL));
        // 1 + e123: x^c = x since grade 3 has sign +1, so t = 2 + 2e123 is not real.
        let x = CliffordElement::one(3) + e(3, &[1, 2, 3]);
        let t = x.trace();
        assert_eq!(t.coeff(BladeIndex::from_bits(0b111)), 2.0);
        assert!(!x.in_quadratic_cone(DEFAULT_TOL));
    }

    #[test]
    fn square_roots_of_minus_one() {
        assert!(e(2, &[2]).in_sqrt_minus_one(DEFAULT_TOL));
        assert!(e(2, &[1, 2]).in_sqrt_minus_one(DEFAULT_TOL));
        assert!(!CliffordElement::one(2).in_sqrt_minus_one(DEFAULT_TOL));
        // e123 squares to +1
        assert!(!e(3, &[1, 2, 3]).in_sqrt_minus_one(DEFAULT_TOL));
    }

    #[test]
    fn inverses() {
        assert_eq!(e(2, &[1]).invert(DEFAULT_TOL).unwrap(), -e(2, &[1]));
        assert_eq!(
            CliffordElement::scalar(2, 2.0).invert(DEFAULT_TOL).unwrap(),
            CliffordElement::scalar(2, 0.5)
        );
        let jk = e(2, &[1]) - e(2, &[2]);
        let inv = jk.invert(DEFAULT_TOL).unwrap();
        assert!((&jk * &inv - CliffordElement::one(2)).max_abs() < 1e-12);
        // 1 + e123 is a zero divisor in R_3: (1 + e123)(1 - e123) = 1 - e123² = 0.
        let zd = CliffordElement::one(3) + e(3, &[1, 2, 3]);
        assert!(matches!(zd.invert(DEFAULT_TOL), Err(Error::NotInvertible { .. })));
    }

    #[test]
    fn non_cone_inverse_uses_solve() {
        let m = 3;
        // J = e12 and K = e3 both lie in S_3, yet J - K is a zero divisor:
        // (e12 - e3)² = -2(1 + e123).
        let singular = e(m, &[1, 2]) - e(m, &[3]);
        assert!(matches!(singular.invert(DEFAULT_TOL), Err(Error::NotInvertible { .. })));

        let x = e(m, &[1, 2]) - e(m, &[3]).scale(2.0);
        assert!(!x.in_quadratic_cone(DEFAULT_TOL));
        let y = x.invert(DEFAULT_TOL).unwrap();
        assert!((&x * &y - CliffordElement::one(m)).max_abs() < 1e-12);
        assert!((&y * &x - CliffordElement::one(m)).max_abs() < 1e-12);
    }

    #[test]
    fn large_m_product_without_table() {
        let m = 8;
        let a = e(m, &[1, 7, 8]);
        let b = e(m, &[2, 8]);
        let table_free = blade_sign(BladeIndex::from_bits(0b1100_0001), BladeIndex::from_bits(0b1000_0010));
        let p = &a * &b;
        assert_eq!(p.coeff(BladeIndex::from_indices(&[1, 2, 7]).unwrap()), table_free);
    }

    #[test]
    fn serde_round_trip_and_validation() {
        let x = e(2, &[1, 2]).scale(0.5);
        let s = serde_json::to_string(&x).unwrap();
        assert_eq!(s, r#"{"m":2,"coeffs":[0.0,0.0,0.0,0.5]}"#);
        let back: CliffordElement = serde_json::from_str(&s).unwrap();
        assert_eq!(back, x);
        assert!(serde_json::from_str::<CliffordElement>(r#"{"m":2,"coeffs":[1.0]}"#).is_err());
    }

    #[test]
    fn display() {
        assert_eq!(e(3, &[1, 3]).to_string(), "1·e13");
        assert_eq!(CliffordElement::zero(1).to_string(), "0");
    }
}

#[cfg(test)]
mod props {
    use super::*;
    use proptest::prelude::*;

    fn element(m: usize) -> impl Strategy<Value = CliffordElement> {
        prop::collection::vec(-2.0..2.0f64, 1 << m).prop_map(move |c| CliffordElement::from_coeffs(m, c).unwrap())
    }

    fn triple() -> impl Strategy<Value = (CliffordElement, CliffordElement, CliffordElement)> {
        (1usize..=5).prop_flat_map(|m| (element(m), element(m), element(m)))
    }

    proptest! {
        #[test]
        fn product_is_associative((a, b, c) in triple()) {
            let lhs = &(&a * &b) * &c;
            let rhs = &a * &(&b * &c);
            prop_assert!((&lhs - &rhs).max_abs() <= 1e-12);
        }

        #[test]
        fn conjugation_is_an_involutive_anti_automorphism((a, b, _c) in triple()) {
            prop_assert_eq!(a.conjugate().conjugate(), a.clone());
            let lhs = (&a * &b).conjugate();
            let rhs = &b.conjugate() * &a.conjugate();
            prop_assert!((&lhs - &rhs).max_abs() <= 1e-12);
        }

        #[test]
        fn product_distributes_over_sum((a, b, c) in triple()) {
            let lhs = &a * &(&b + &c);
            let rhs = &(&a * &b) + &(&a * &c);
            prop_assert!((&lhs - &rhs).max_abs() <= 1e-12);
        }
    }
}
