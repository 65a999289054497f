//! Exact arithmetic for polynomials and polynomial matrices over GF(2)[D].
//!
//! Polynomials are bit sets in a `u64` (bit i = coefficient of D^i), which caps
//! the representable degree at 63; operations that would exceed the cap return
//! a structured error instead of truncating. On top of polynomial arithmetic
//! this module provides the invariant-factor (Smith) decomposition over
//! GF(2)[D] and the derived constructions used throughout the crate:
//! polynomial right inverses, syndrome formers, and left-inverse transposes.

use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("matrix shape mismatch: {0}")]
    Shape(String),
    #[error("polynomial degree would exceed the representable cap (63)")]
    DegreeCap,
    #[error("no polynomial right inverse: an invariant factor is not 1")]
    NoPolynomialInverse,
    #[error("determinant requires a square matrix")]
    NonSquare,
    #[error("invalid polynomial literal: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, AlgebraError>;

/// A polynomial over GF(2) in the delay operator D, stored LSB-first.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Gf2Poly(pub u64);

impl Gf2Poly {
    pub const ZERO: Gf2Poly = Gf2Poly(0);
    pub const ONE: Gf2Poly = Gf2Poly(1);

    pub fn monomial(power: u32) -> Result<Gf2Poly> {
        if power > 63 {
            return Err(AlgebraError::DegreeCap);
        }
        Ok(Gf2Poly(1u64 << power))
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    /// Degree, or None for the zero polynomial.
    pub fn degree(self) -> Option<u32> {
        if self.0 == 0 {
            None
        } else {
            Some(63 - self.0.leading_zeros())
        }
    }

    pub fn coeff(self, power: u32) -> bool {
        power <= 63 && (self.0 >> power) & 1 == 1
    }

    pub fn weight(self) -> u32 {
        self.0.count_ones()
    }

    pub fn add(self, rhs: Gf2Poly) -> Gf2Poly {
        Gf2Poly(self.0 ^ rhs.0)
    }

    /// Carry-less product, checking the degree cap.
    pub fn mul(self, rhs: Gf2Poly) -> Result<Gf2Poly> {
        if self.is_zero() || rhs.is_zero() {
            return Ok(Gf2Poly::ZERO);
        }
        let (da, db) = (self.degree().unwrap(), rhs.degree().unwrap());
        if da + db > 63 {
            return Err(AlgebraError::DegreeCap);
        }
        let mut acc = 0u64;
        let mut a = self.0;
        let mut shift = 0;
        while a != 0 {
            let tz = a.trailing_zeros();
            shift += tz;
            acc ^= rhs.0 << shift;
            a >>= tz + 1;
            shift += 1;
        }
        Ok(Gf2Poly(acc))
    }

    /// acc + self·rhs.
    pub fn mul_add(self, rhs: Gf2Poly, acc: Gf2Poly) -> Result<Gf2Poly> {
        Ok(self.mul(rhs)?.add(acc))
    }

    /// Euclidean division: returns (quotient, remainder) with deg r < deg rhs.
    pub fn divmod(self, rhs: Gf2Poly) -> (Gf2Poly, Gf2Poly) {
        assert!(!rhs.is_zero(), "division by the zero polynomial");
        let dd = rhs.degree().unwrap();
        let mut rem = self.0;
        let mut quo = 0u64;
        while let Some(dr) = Gf2Poly(rem).degree() {
            if dr < dd {
                break;
            }
            let shift = dr - dd;
            quo ^= 1u64 << shift;
            rem ^= rhs.0 << shift;
        }
        (Gf2Poly(quo), Gf2Poly(rem))
    }

    /// Parse a binary coefficient string, LSB first ("111" = 1 + D + D²).
    pub fn parse_binary(s: &str) -> Result<Gf2Poly> {
        if s.is_empty() || s.len() > 64 {
            return Err(AlgebraError::Parse(s.to_string()));
        }
        let mut bits = 0u64;
        for (i, ch) in s.chars().enumerate() {
            match ch {
                '0' => {}
                '1' => bits |= 1u64 << i,
                _ => return Err(AlgebraError::Parse(s.to_string())),
            }
        }
        Ok(Gf2Poly(bits))
    }

    /// Parse octal shorthand: the octal value read as binary, MSB = D⁰
    /// coefficient after stripping leading zeros ("7" = 1+D+D², "5" = 1+D²).
    pub fn parse_octal(s: &str) -> Result<Gf2Poly> {
        let v = u64::from_str_radix(s, 8).map_err(|_| AlgebraError::Parse(s.to_string()))?;
        Ok(Gf2Poly(v.reverse_bits() >> v.leading_zeros().min(63)))
    }

    /// Binary coefficient string, LSB first.
    pub fn to_binary(self) -> String {
        match self.degree() {
            None => "0".to_string(),
            Some(d) => (0..=d).map(|i| if self.coeff(i) { '1' } else { '0' }).collect(),
        }
    }
}

impl fmt::Debug for Gf2Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let terms: Vec<String> = (0..=self.degree().unwrap())
            .filter(|&i| self.coeff(i))
            .map(|i| match i {
                0 => "1".to_string(),
                1 => "D".to_string(),
                _ => format!("D^{i}"),
            })
            .collect();
        write!(f, "{}", terms.join("+"))
    }
}

impl fmt::Display for Gf2Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Dense row-major matrix over GF(2)[D].
#[derive(Clone, PartialEq, Eq)]
pub struct PolyMatrix {
    pub rows: usize,
    pub cols: usize,
    entries: Vec<Gf2Poly>,
}

impl PolyMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Gf2Poly>) -> PolyMatrix {
        assert_eq!(entries.len(), rows * cols, "entry grid must be rows x cols");
        assert!(rows > 0 && cols > 0);
        PolyMatrix { rows, cols, entries }
    }

    pub fn zero(rows: usize, cols: usize) -> PolyMatrix {
        PolyMatrix::new(rows, cols, vec![Gf2Poly::ZERO; rows * cols])
    }

    pub fn identity(n: usize) -> PolyMatrix {
        let mut m = PolyMatrix::zero(n, n);
        for i in 0..n {
            m[(i, i)] = Gf2Poly::ONE;
        }
        m
    }

    /// Build from binary LSB-first strings, row major.
    pub fn from_binary(rows: usize, cols: usize, strs: &[&str]) -> Result<PolyMatrix> {
        if strs.len() != rows * cols {
            return Err(AlgebraError::Shape(format!(
                "expected {} entries, got {}",
                rows * cols,
                strs.len()
            )));
        }
        let entries = strs.iter().map(|s| Gf2Poly::parse_binary(s)).collect::<Result<Vec<_>>>()?;
        Ok(PolyMatrix::new(rows, cols, entries))
    }

    pub fn transpose(&self) -> PolyMatrix {
        let mut t = PolyMatrix::zero(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t[(c, r)] = self[(r, c)];
            }
        }
        t
    }

    pub fn add(&self, rhs: &PolyMatrix) -> Result<PolyMatrix> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(AlgebraError::Shape(format!(
                "{}x{} + {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let entries = self.entries.iter().zip(&rhs.entries).map(|(a, b)| a.add(*b)).collect();
        Ok(PolyMatrix::new(self.rows, self.cols, entries))
    }

    pub fn max_degree(&self) -> u32 {
        self.entries.iter().filter_map(|p| p.degree()).max().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|p| p.is_zero())
    }

    /// Scale by a scalar polynomial.
    pub fn scale(&self, s: Gf2Poly) -> Result<PolyMatrix> {
        let entries = self.entries.iter().map(|p| p.mul(s)).collect::<Result<Vec<_>>>()?;
        Ok(PolyMatrix::new(self.rows, self.cols, entries))
    }
}

impl std::ops::Index<(usize, usize)> for PolyMatrix {
    type Output = Gf2Poly;
    fn index(&self, (r, c): (usize, usize)) -> &Gf2Poly {
        &self.entries[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for PolyMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Gf2Poly {
        &mut self.entries[r * self.cols + c]
    }
}

impl fmt::Debug for PolyMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

pub fn mat_mul(x: &PolyMatrix, y: &PolyMatrix) -> Result<PolyMatrix> {
    if x.cols != y.rows {
        return Err(AlgebraError::Shape(format!(
            "cannot multiply {}x{} by {}x{}",
            x.rows, x.cols, y.rows, y.cols
        )));
    }
    let mut out = PolyMatrix::zero(x.rows, y.cols);
    for r in 0..x.rows {
        for c in 0..y.cols {
            let mut acc = Gf2Poly::ZERO;
            for k in 0..x.cols {
                acc = x[(r, k)].mul_add(y[(k, c)], acc)?;
            }
            out[(r, c)] = acc;
        }
    }
    Ok(out)
}

/// Determinant over GF(2)[D] by cofactor expansion (matrices here are small).
pub fn det(m: &PolyMatrix) -> Result<Gf2Poly> {
    if m.rows != m.cols {
        return Err(AlgebraError::NonSquare);
    }
    fn rec(m: &PolyMatrix, rows: &[usize], cols: &[usize]) -> Result<Gf2Poly> {
        if rows.len() == 1 {
            return Ok(m[(rows[0], cols[0])]);
        }
        let mut acc = Gf2Poly::ZERO;
        let sub_rows: Vec<usize> = rows[1..].to_vec();
        for (i, &c) in cols.iter().enumerate() {
            let pivot = m[(rows[0], c)];
            if pivot.is_zero() {
                continue;
            }
            let sub_cols: Vec<usize> =
                cols.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &cc)| cc).collect();
            let minor = rec(m, &sub_rows, &sub_cols)?;
            acc = pivot.mul_add(minor, acc)?;
        }
        Ok(acc)
    }
    let rows: Vec<usize> = (0..m.rows).collect();
    let cols: Vec<usize> = (0..m.cols).collect();
    rec(m, &rows, &cols)
}

/// Invariant-factor decomposition m = A·Γ·B with unimodular A, B.
#[derive(Clone, Debug)]
pub struct SmithDecomposition {
    pub a: PolyMatrix,
    pub gamma: PolyMatrix,
    pub b: PolyMatrix,
    pub a_inv: PolyMatrix,
    pub b_inv: PolyMatrix,
}

/// Smith decomposition over the Euclidean domain GF(2)[D].
///
/// Pivot selection: nonzero entry of minimal degree, ties broken by lowest
/// (row, col), which makes the output deterministic.
pub fn smith_decompose(m: &PolyMatrix) -> Result<SmithDecomposition> {
    let (rows, cols) = (m.rows, m.cols);
    let mut g = m.clone();
    let mut a = PolyMatrix::identity(rows);
    let mut a_inv = PolyMatrix::identity(rows);
    let mut b = PolyMatrix::identity(cols);
    let mut b_inv = PolyMatrix::identity(cols);

    // Elementary operations, maintaining m = a·g·b throughout. Over GF(2) the
    // add-multiple operations are involutions, so inverses need no negation.
    fn swap_rows(g: &mut PolyMatrix, a: &mut PolyMatrix, a_inv: &mut PolyMatrix, i: usize, j: usize) {
        for c in 0..g.cols {
            let (x, y) = (g[(i, c)], g[(j, c)]);
            g[(i, c)] = y;
            g[(j, c)] = x;
        }
        // g' = E·g  ⇒  a' = a·E, a_inv' = E·a_inv (E = row-swap, self-inverse)
        for c in 0..a.cols {
            let (x, y) = (a[(c, i)], a[(c, j)]);
            // a·E swaps *columns* i and j of a
            a[(c, i)] = y;
            a[(c, j)] = x;
        }
        for c in 0..a_inv.cols {
            let (x, y) = (a_inv[(i, c)], a_inv[(j, c)]);
            a_inv[(i, c)] = y;
            a_inv[(j, c)] = x;
        }
    }
    fn swap_cols(g: &mut PolyMatrix, b: &mut PolyMatrix, b_inv: &mut PolyMatrix, i: usize, j: usize) {
        for r in 0..g.rows {
            let (x, y) = (g[(r, i)], g[(r, j)]);
            g[(r, i)] = y;
            g[(r, j)] = x;
        }
        // g' = g·E ⇒ b' = E·b (swap rows i,j of b), b_inv' = b_inv·E
        for c in 0..b.cols {
            let (x, y) = (b[(i, c)], b[(j, c)]);
            b[(i, c)] = y;
            b[(j, c)] = x;
        }
        for r in 0..b_inv.rows {
            let (x, y) = (b_inv[(r, i)], b_inv[(r, j)]);
            b_inv[(r, i)] = y;
            b_inv[(r, j)] = x;
        }
    }
    // row j += q·row i
    fn add_row(
        g: &mut PolyMatrix,
        a: &mut PolyMatrix,
        a_inv: &mut PolyMatrix,
        i: usize,
        j: usize,
        q: Gf2Poly,
    ) -> Result<()> {
        for c in 0..g.cols {
            g[(j, c)] = q.mul_add(g[(i, c)], g[(j, c)])?;
        }
        // E adds q·row i into row j; a' = a·E adds q·col j into col i... note:
        // (a·E)[r][i] = a[r][i] + a[r][j]·q? E = I + q·e_{ji} (entry at row j, col i)
        // ⇒ (a·E)[·,i] = a[·,i] + a[·,j]·q, and E·a_inv adds q·row i into row j.
        for r in 0..a.rows {
            a[(r, i)] = q.mul_add(a[(r, j)], a[(r, i)])?;
        }
        for c in 0..a_inv.cols {
            a_inv[(j, c)] = q.mul_add(a_inv[(i, c)], a_inv[(j, c)])?;
        }
        Ok(())
    }
    // col j += q·col i
    fn add_col(
        g: &mut PolyMatrix,
        b: &mut PolyMatrix,
        b_inv: &mut PolyMatrix,
        i: usize,
        j: usize,
        q: Gf2Poly,
    ) -> Result<()> {
        for r in 0..g.rows {
            g[(r, j)] = q.mul_add(g[(r, i)], g[(r, j)])?;
        }
        // g' = g·E with E = I + q·e_{ij} (row i, col j); b' = E·b adds q·row j
        // into row i; b_inv' = b_inv·E adds q·col i into col j? E⁻¹ = E, and we
        // need b'·(b')⁻¹ = I with b' = E·b ⇒ (b')⁻¹ = b⁻¹·E.
        for c in 0..b.cols {
            b[(i, c)] = q.mul_add(b[(j, c)], b[(i, c)])?;
        }
        for r in 0..b_inv.rows {
            b_inv[(r, j)] = q.mul_add(b_inv[(r, i)], b_inv[(r, j)])?;
        }
        Ok(())
    }

    let steps = rows.min(cols);
    for t in 0..steps {
        loop {
            // Minimal-degree nonzero pivot in the trailing submatrix.
            let mut pivot: Option<(u32, usize, usize)> = None;
            for r in t..rows {
                for c in t..cols {
                    if let Some(d) = g[(r, c)].degree() {
                        if pivot.map_or(true, |(pd, _, _)| d < pd) {
                            pivot = Some((d, r, c));
                        }
                    }
                }
            }
            let Some((_, pr, pc)) = pivot else {
                // trailing submatrix is zero; done
                return Ok(SmithDecomposition { a, gamma: g, b, a_inv, b_inv });
            };
            if pr != t {
                swap_rows(&mut g, &mut a, &mut a_inv, t, pr);
            }
            if pc != t {
                swap_cols(&mut g, &mut b, &mut b_inv, t, pc);
            }
            let p = g[(t, t)];
            // Reduce the pivot row and column.
            let mut dirty = false;
            for r in t + 1..rows {
                if !g[(r, t)].is_zero() {
                    let (q, _) = g[(r, t)].divmod(p);
                    add_row(&mut g, &mut a, &mut a_inv, t, r, q)?;
                    if !g[(r, t)].is_zero() {
                        dirty = true; // remainder left; re-pivot on it
                    }
                }
            }
            for c in t + 1..cols {
                if !g[(t, c)].is_zero() {
                    let (q, _) = g[(t, c)].divmod(p);
                    add_col(&mut g, &mut b, &mut b_inv, t, c, q)?;
                    if !g[(t, c)].is_zero() {
                        dirty = true;
                    }
                }
            }
            if dirty {
                continue;
            }
            // Pivot must divide every remaining entry for true invariant factors.
            let mut fixed = true;
            'scan: for r in t + 1..rows {
                for c in t + 1..cols {
                    let (_, rem) = g[(r, c)].divmod(p);
                    if !rem.is_zero() {
                        // Fold that row into the pivot row and restart the step.
                        add_row(&mut g, &mut a, &mut a_inv, r, t, Gf2Poly::ONE)?;
                        fixed = false;
                        break 'scan;
                    }
                }
            }
            if fixed {
                break;
            }
        }
    }
    Ok(SmithDecomposition { a, gamma: g, b, a_inv, b_inv })
}

/// Lowest-degree representative of `candidate` modulo the column span of
/// `kernel` (greedy leading-term reduction per column, then a small search
/// over monomial multiples). Total degree = sum of entry weights·degrees is
/// the minimized quantity, with ties keeping the current value.
fn reduce_mod_kernel(mut cand: PolyMatrix, kernel: &PolyMatrix) -> Result<PolyMatrix> {
    assert_eq!(cand.rows, kernel.rows);
    let cost = |m: &PolyMatrix| -> (u64, u64) {
        let mut deg_sum = 0u64;
        let mut weight = 0u64;
        for r in 0..m.rows {
            for c in 0..m.cols {
                deg_sum += m[(r, c)].degree().map_or(0, |d| d as u64 + 1);
                weight += m[(r, c)].weight() as u64;
            }
        }
        (deg_sum, weight)
    };
    let max_pow = cand.max_degree().max(kernel.max_degree()) + 1;
    let mut improved = true;
    while improved {
        improved = false;
        for cc in 0..cand.cols {
            for kc in 0..kernel.cols {
                for pow in 0..=max_pow {
                    let q = Gf2Poly::monomial(pow)?;
                    let mut trial = cand.clone();
                    let mut ok = true;
                    for r in 0..cand.rows {
                        match kernel[(r, kc)].mul(q) {
                            Ok(p) => trial[(r, cc)] = trial[(r, cc)].add(p),
                            Err(_) => {
                                ok = false;
                                break;
                            }
                        }
                    }
                    if ok && cost(&trial) < cost(&cand) {
                        cand = trial;
                        improved = true;
                    }
                }
            }
        }
    }
    Ok(cand)
}

/// Polynomial right inverse: G·G⁻¹ = I. Requires all invariant factors = 1.
/// The representative is normalized to lowest total degree modulo the right
/// kernel, which reproduces the paper-fixed choices (e.g. (D, 1+D)ᵀ).
pub fn right_inverse(g: &PolyMatrix) -> Result<PolyMatrix> {
    let (k, n) = (g.rows, g.cols);
    if k > n {
        return Err(AlgebraError::Shape(format!("{}x{} has no right inverse", k, n)));
    }
    let smith = smith_decompose(g)?;
    for i in 0..k {
        if smith.gamma[(i, i)] != Gf2Poly::ONE {
            return Err(AlgebraError::NoPolynomialInverse);
        }
    }
    // G = A·Γ·B ⇒ G⁻¹ = B⁻¹·Γ⁺·A⁻¹ with Γ⁺ the n×k identity extension.
    let mut gamma_plus = PolyMatrix::zero(n, k);
    for i in 0..k {
        gamma_plus[(i, i)] = Gf2Poly::ONE;
    }
    let ginv = mat_mul(&mat_mul(&smith.b_inv, &gamma_plus)?, &smith.a_inv)?;
    if n > k {
        // Reduce modulo the right kernel (spanned by the syndrome former).
        let ht = syndrome_former_raw(&smith, k, n);
        reduce_mod_kernel(ginv, &ht)
    } else {
        Ok(ginv)
    }
}

fn syndrome_former_raw(smith: &SmithDecomposition, k: usize, n: usize) -> PolyMatrix {
    let mut ht = PolyMatrix::zero(n, n - k);
    for r in 0..n {
        for c in 0..n - k {
            ht[(r, c)] = smith.b_inv[(r, k + c)];
        }
    }
    ht
}

/// Syndrome former Hᵀ (n₀ × (n₀−k₀)): the last n₀−k₀ columns of B⁻¹, so
/// G·Hᵀ = 0 by construction.
pub fn syndrome_former(g: &PolyMatrix) -> Result<PolyMatrix> {
    let (k, n) = (g.rows, g.cols);
    if k >= n {
        return Err(AlgebraError::Shape(format!("{}x{} leaves no parity space", k, n)));
    }
    let smith = smith_decompose(g)?;
    for i in 0..k {
        if smith.gamma[(i, i)] != Gf2Poly::ONE {
            return Err(AlgebraError::NoPolynomialInverse);
        }
    }
    Ok(syndrome_former_raw(&smith, k, n))
}

/// (H⁻¹)ᵀ with (H⁻¹)ᵀ·Hᵀ = I: the transpose of a right inverse of H,
/// normalized the same way as `right_inverse` (for C₁ this yields (1+D, D)).
pub fn left_inverse_transpose(h: &PolyMatrix) -> Result<PolyMatrix> {
    Ok(right_inverse(h)?.transpose())
}

impl fmt::Display for PolyMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|c| format!("{}", self[(r, c)])).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}
