//! Bit-packed GF(2) matrix algebra.
//!
//! Everything the EP code machinery needs from linear algebra over GF(2):
//! Kronecker matrix generation, multiplication, Gauss-Jordan inversion,
//! column permutations, the systematic transform of a generator matrix, and
//! systematic CRC encoding matrices.
//!
//! Rows are packed into `u64` words, least-significant bit first, so row
//! XOR and row-times-matrix products run a word at a time. All indexing is
//! 0-based.

use thiserror::Error;

/// Errors from GF(2) matrix operations that depend on the input data rather
/// than on caller bookkeeping (dimension mismatches panic instead).
#[derive(Debug, Error, PartialEq, Eq)]
pub enum Gf2Error {
    /// Inversion of a rank-deficient square matrix. The achieved rank is
    /// reported to aid debugging of code constructions.
    #[error("singular matrix over GF(2): rank {rank} < {dim}")]
    Singular { rank: usize, dim: usize },
    /// A generator whose rows are not linearly independent.
    #[error("rows are linearly dependent over GF(2): rank {rank} < {rows}")]
    DependentRows { rank: usize, rows: usize },
    /// CRC polynomial with a zero leading or trailing coefficient, or one
    /// that does not fit the requested degree.
    #[error("degenerate CRC polynomial {poly:#x} for degree {degree}")]
    DegeneratePolynomial { poly: u64, degree: usize },
}

const WORD_BITS: usize = 64;

/// Dense GF(2) matrix with bit-packed rows.
#[derive(Clone, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    words_per_row: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    /// All-zero matrix. Zero-row or zero-column matrices are permitted for
    /// degenerate code configurations (no assigned element pairs).
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let words_per_row = cols.div_ceil(WORD_BITS);
        BitMatrix {
            rows,
            cols,
            words_per_row,
            data: vec![0; rows * words_per_row],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Builds a matrix from explicit 0/1 rows. Panics if rows have uneven
    /// lengths or entries outside {0, 1}.
    pub fn from_rows(rows: &[Vec<u8>]) -> Self {
        assert!(!rows.is_empty(), "from_rows needs at least one row");
        let cols = rows[0].len();
        let mut m = Self::zeros(rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), cols, "row {i} has inconsistent length");
            for (j, &b) in row.iter().enumerate() {
                assert!(b <= 1, "entry ({i},{j}) is not a bit");
                m.set(i, j, b == 1);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        debug_assert!(r < self.rows && c < self.cols);
        let w = self.data[r * self.words_per_row + c / WORD_BITS];
        (w >> (c % WORD_BITS)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: bool) {
        debug_assert!(r < self.rows && c < self.cols);
        let idx = r * self.words_per_row + c / WORD_BITS;
        let mask = 1u64 << (c % WORD_BITS);
        if v {
            self.data[idx] |= mask;
        } else {
            self.data[idx] &= !mask;
        }
    }

    #[inline]
    pub fn row_words(&self, r: usize) -> &[u64] {
        &self.data[r * self.words_per_row..(r + 1) * self.words_per_row]
    }

    /// XORs row `r` into a word accumulator of matching width.
    #[inline]
    pub fn xor_row_into(&self, r: usize, acc: &mut [u64]) {
        debug_assert_eq!(acc.len(), self.words_per_row);
        for (a, w) in acc.iter_mut().zip(self.row_words(r)) {
            *a ^= w;
        }
    }

    pub fn row_bits(&self, r: usize) -> Vec<u8> {
        (0..self.cols).map(|c| self.get(r, c) as u8).collect()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let w = self.words_per_row;
        for k in 0..w {
            self.data.swap(a * w + k, b * w + k);
        }
    }

    /// `row[dst] ^= row[src]` for distinct rows.
    fn xor_rows(&mut self, dst: usize, src: usize) {
        assert_ne!(dst, src);
        let w = self.words_per_row;
        let hi = dst.max(src);
        let (head, tail) = self.data.split_at_mut(hi * w);
        let (dst_row, src_row): (&mut [u64], &[u64]) = if dst > src {
            (&mut tail[..w], &head[src * w..src * w + w])
        } else {
            (&mut head[dst * w..dst * w + w], &tail[..w])
        };
        for k in 0..w {
            dst_row[k] ^= src_row[k];
        }
    }

    /// `self * rhs` over GF(2). Panics on a dimension mismatch.
    pub fn mul(&self, rhs: &BitMatrix) -> BitMatrix {
        assert_eq!(
            self.cols, rhs.rows,
            "dimension mismatch: {}x{} * {}x{}",
            self.rows, self.cols, rhs.rows, rhs.cols
        );
        let mut out = BitMatrix::zeros(self.rows, rhs.cols);
        let w_out = out.words_per_row;
        for i in 0..self.rows {
            let row = self.row_words(i);
            for (wi, &word) in row.iter().enumerate() {
                let mut bits = word;
                while bits != 0 {
                    let k = wi * WORD_BITS + bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    if k < self.cols {
                        let src = rhs.row_words(k).as_ptr();
                        let dst = out.data[i * w_out..(i + 1) * w_out].as_mut_ptr();
                        // rhs and out are distinct allocations; plain loop
                        unsafe {
                            for t in 0..w_out {
                                *dst.add(t) ^= *src.add(t);
                            }
                        }
                    }
                }
            }
        }
        out
    }

    /// Row vector times matrix: `v * self`. `v` holds 0/1 entries of length
    /// `self.rows()`.
    pub fn mul_vec_left(&self, v: &[u8]) -> Vec<u8> {
        assert_eq!(v.len(), self.rows, "vector length must match row count");
        let mut acc = vec![0u64; self.words_per_row];
        for (k, &b) in v.iter().enumerate() {
            if b == 1 {
                self.xor_row_into(k, &mut acc);
            }
        }
        (0..self.cols)
            .map(|c| ((acc[c / WORD_BITS] >> (c % WORD_BITS)) & 1) as u8)
            .collect()
    }

    /// Inverse over GF(2) by Gauss-Jordan elimination on `[A | I]`.
    pub fn inverse(&self) -> Result<BitMatrix, Gf2Error> {
        assert_eq!(self.rows, self.cols, "inverse needs a square matrix");
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = BitMatrix::identity(n);
        let mut rank = 0;
        for col in 0..n {
            let pivot = (rank..n).find(|&r| a.get(r, col));
            let Some(p) = pivot else { continue };
            a.swap_rows(rank, p);
            inv.swap_rows(rank, p);
            for r in 0..n {
                if r != rank && a.get(r, col) {
                    a.xor_rows(r, rank);
                    inv.xor_rows(r, rank);
                }
            }
            rank += 1;
        }
        if rank < n {
            return Err(Gf2Error::Singular { rank, dim: n });
        }
        Ok(inv)
    }

    /// Rank by forward elimination on a copy.
    pub fn rank(&self) -> usize {
        let mut a = self.clone();
        let mut rank = 0;
        for col in 0..a.cols {
            if rank == a.rows {
                break;
            }
            let pivot = (rank..a.rows).find(|&r| a.get(r, col));
            let Some(p) = pivot else { continue };
            a.swap_rows(rank, p);
            for r in rank + 1..a.rows {
                if a.get(r, col) {
                    a.xor_rows(r, rank);
                }
            }
            rank += 1;
        }
        rank
    }

    /// Submatrix formed by the given rows and columns, in the given order.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> BitMatrix {
        let mut out = BitMatrix::zeros(rows.len(), cols.len());
        for (i, &r) in rows.iter().enumerate() {
            for (j, &c) in cols.iter().enumerate() {
                out.set(i, j, self.get(r, c));
            }
        }
        out
    }

    /// Submatrix of whole rows.
    pub fn select_rows(&self, rows: &[usize]) -> BitMatrix {
        let mut out = BitMatrix::zeros(rows.len(), self.cols);
        for (i, &r) in rows.iter().enumerate() {
            assert!(r < self.rows, "row index {r} out of range");
            let w = self.words_per_row;
            out.data[i * w..(i + 1) * w].copy_from_slice(self.row_words(r));
        }
        out
    }
}

impl std::fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows {
            for c in 0..self.cols {
                write!(f, "{}", self.get(r, c) as u8)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// The kernel and its Kronecker powers: `kronecker(1)` is `[[1,0],[1,1]]`,
/// and each further fold doubles the matrix by the block recursion
/// `[[G, 0], [G, G]]`, yielding the 2^kappa x 2^kappa transform.
///
/// # Panics
///
/// Panics for `kappa == 0`; the kernel is the one-fold base case.
pub fn kronecker(kappa: usize) -> BitMatrix {
    assert!(kappa >= 1, "kronecker fold count must be at least 1");
    let mut g = BitMatrix::from_rows(&[vec![1, 0], vec![1, 1]]);
    for _ in 1..kappa {
        let s = g.rows();
        let mut next = BitMatrix::zeros(2 * s, 2 * s);
        for i in 0..s {
            for j in 0..s {
                if g.get(i, j) {
                    next.set(i, j, true);
                    next.set(s + i, j, true);
                    next.set(s + i, s + j, true);
                }
            }
        }
        g = next;
    }
    g
}

/// A bijection on column indices. `perm[p]` is the source column that lands
/// at position `p` when the permutation is applied.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColumnPermutation {
    perm: Vec<usize>,
}

impl ColumnPermutation {
    pub fn new(perm: Vec<usize>) -> Self {
        let mut seen = vec![false; perm.len()];
        for &p in &perm {
            assert!(p < perm.len() && !seen[p], "not a permutation");
            seen[p] = true;
        }
        ColumnPermutation { perm }
    }

    pub fn identity(n: usize) -> Self {
        ColumnPermutation {
            perm: (0..n).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &p)| i == p)
    }

    pub fn indices(&self) -> &[usize] {
        &self.perm
    }

    /// Position that source index `src` is sent to.
    pub fn position_of(&self, src: usize) -> usize {
        self.perm.iter().position(|&p| p == src).expect("in range")
    }

    pub fn inverse(&self) -> ColumnPermutation {
        let mut inv = vec![0; self.perm.len()];
        for (p, &src) in self.perm.iter().enumerate() {
            inv[src] = p;
        }
        ColumnPermutation { perm: inv }
    }

    /// Gathers matrix columns into the permuted order.
    pub fn apply(&self, m: &BitMatrix) -> BitMatrix {
        assert_eq!(m.cols(), self.perm.len(), "permutation length mismatch");
        let mut out = BitMatrix::zeros(m.rows(), m.cols());
        for (p, &src) in self.perm.iter().enumerate() {
            for r in 0..m.rows() {
                if m.get(r, src) {
                    out.set(r, p, true);
                }
            }
        }
        out
    }

    /// Gathers slice entries into the permuted order: `out[p] = v[perm[p]]`.
    pub fn apply_slice<T: Copy>(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.perm.len(), "permutation length mismatch");
        self.perm.iter().map(|&src| v[src]).collect()
    }
}

/// Transforms a generator `gm1` (the Kronecker matrix restricted to rows in
/// `index_set`) into systematic `[I | Q]` form.
///
/// Step 1 left-multiplies by the inverse of the square submatrix formed by
/// the `index_set` columns; step 2 gathers those columns into the leading
/// identity block. Returns the systematic matrix together with the column
/// permutation used, so callers can map between natural and transmit order.
pub fn systematic_transform(
    gm1: &BitMatrix,
    index_set: &[usize],
) -> Result<(BitMatrix, ColumnPermutation), Gf2Error> {
    assert_eq!(
        gm1.rows(),
        index_set.len(),
        "index set size must match generator rows"
    );
    let m = gm1.cols();
    if index_set.is_empty() {
        return Ok((gm1.clone(), ColumnPermutation::identity(m)));
    }
    assert!(
        index_set.windows(2).all(|w| w[0] < w[1]) && *index_set.last().unwrap() < m,
        "index set must be sorted, unique, and within the column range"
    );
    let all_rows: Vec<usize> = (0..gm1.rows()).collect();
    let g_aa = gm1.submatrix(&all_rows, index_set);
    let inv = g_aa.inverse().map_err(|e| match e {
        Gf2Error::Singular { rank, .. } => Gf2Error::DependentRows {
            rank,
            rows: gm1.rows(),
        },
        other => other,
    })?;
    let straightened = inv.mul(gm1);
    let mut order = index_set.to_vec();
    order.extend((0..m).filter(|c| index_set.binary_search(c).is_err()));
    let perm = ColumnPermutation::new(order);
    Ok((perm.apply(&straightened), perm))
}

/// Remainder of `data(x) * x^degree mod (x^degree + poly(x))`, most
/// significant bit first. `poly` encodes the low-order coefficients; the
/// leading coefficient is implicit.
pub fn crc_remainder(data: &[u8], degree: usize, poly: u64) -> Vec<u8> {
    assert!(degree >= 1 && degree < 64);
    let mask = (1u64 << degree) - 1;
    let mut reg: u64 = 0;
    for &b in data {
        debug_assert!(b <= 1);
        let top = ((reg >> (degree - 1)) & 1) as u8 ^ b;
        reg = (reg << 1) & mask;
        if top == 1 {
            reg ^= poly;
        }
    }
    (0..degree)
        .map(|i| ((reg >> (degree - 1 - i)) & 1) as u8)
        .collect()
}

/// Systematic CRC encoding matrix mapping a payload row vector to
/// `(payload, crc)` of length `payload_len + crc_len`.
///
/// With `crc_len == 0` this is the identity. The polynomial must have a
/// nonzero constant term and fit below the implicit leading coefficient.
pub fn crc_generator(
    payload_len: usize,
    crc_len: usize,
    poly: u64,
) -> Result<BitMatrix, Gf2Error> {
    if crc_len == 0 {
        return Ok(BitMatrix::identity(payload_len));
    }
    if crc_len >= 64 || poly & 1 == 0 || poly >> crc_len != 0 {
        return Err(Gf2Error::DegeneratePolynomial {
            poly,
            degree: crc_len,
        });
    }
    let mut g = BitMatrix::zeros(payload_len, payload_len + crc_len);
    let mut unit = vec![0u8; payload_len];
    for i in 0..payload_len {
        unit[i] = 1;
        g.set(i, i, true);
        for (k, &b) in crc_remainder(&unit, crc_len, poly).iter().enumerate() {
            if b == 1 {
                g.set(i, payload_len + k, true);
            }
        }
        unit[i] = 0;
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: &[&[u8]]) -> BitMatrix {
        BitMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
    }

    /// Independent elimination over plain byte vectors, for rank and
    /// row-space checks that must not share code with BitMatrix.
    fn naive_rref(rows: &mut Vec<Vec<u8>>) {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut pivot_row = 0;
        for col in 0..cols {
            let Some(p) = (pivot_row..rows.len()).find(|&r| rows[r][col] == 1) else {
                continue;
            };
            rows.swap(pivot_row, p);
            for r in 0..rows.len() {
                if r != pivot_row && rows[r][col] == 1 {
                    let (a, b) = if r < pivot_row {
                        let (lo, hi) = rows.split_at_mut(pivot_row);
                        (&mut lo[r], &hi[0])
                    } else {
                        let (lo, hi) = rows.split_at_mut(r);
                        (&mut hi[0], &lo[pivot_row])
                    };
                    for (x, y) in a.iter_mut().zip(b.iter()) {
                        *x ^= *y;
                    }
                }
            }
            pivot_row += 1;
            if pivot_row == rows.len() {
                break;
            }
        }
        rows.retain(|r| r.iter().any(|&b| b == 1));
        rows.sort();
    }

    fn row_space_fingerprint(m: &BitMatrix) -> Vec<Vec<u8>> {
        let mut rows: Vec<Vec<u8>> = (0..m.rows()).map(|r| m.row_bits(r)).collect();
        naive_rref(&mut rows);
        rows
    }

    #[test]
    fn kronecker_one_is_the_kernel() {
        assert_eq!(kronecker(1), mat(&[&[1, 0], &[1, 1]]));
    }

    #[test]
    fn kronecker_two_matches_reference() {
        let expected = mat(&[
            &[1, 0, 0, 0],
            &[1, 1, 0, 0],
            &[1, 0, 1, 0],
            &[1, 1, 1, 1],
        ]);
        assert_eq!(kronecker(2), expected);
    }

    #[test]
    fn kronecker_three_matches_reference() {
        let expected = mat(&[
            &[1, 0, 0, 0, 0, 0, 0, 0],
            &[1, 1, 0, 0, 0, 0, 0, 0],
            &[1, 0, 1, 0, 0, 0, 0, 0],
            &[1, 1, 1, 1, 0, 0, 0, 0],
            &[1, 0, 0, 0, 1, 0, 0, 0],
            &[1, 1, 0, 0, 1, 1, 0, 0],
            &[1, 0, 1, 0, 1, 0, 1, 0],
            &[1, 1, 1, 1, 1, 1, 1, 1],
        ]);
        assert_eq!(kronecker(3), expected);
    }

    #[test]
    #[should_panic(expected = "fold count")]
    fn kronecker_zero_rejected() {
        kronecker(0);
    }

    #[test]
    fn kronecker_is_lower_triangular_full_rank() {
        for kappa in 1..=10 {
            let g = kronecker(kappa);
            let n = 1 << kappa;
            for i in 0..n {
                assert!(g.get(i, i), "unit diagonal at {i}");
                for j in i + 1..n {
                    assert!(!g.get(i, j), "upper triangle must be zero");
                }
            }
            assert_eq!(g.rank(), n);
        }
    }

    #[test]
    fn kronecker_is_self_inverse() {
        for kappa in 1..=10 {
            let g = kronecker(kappa);
            assert_eq!(g.mul(&g), BitMatrix::identity(1 << kappa), "kappa={kappa}");
        }
    }

    #[test]
    fn mul_by_identity_is_identity_map() {
        let x = mat(&[&[1, 1, 0], &[0, 1, 1]]);
        assert_eq!(BitMatrix::identity(2).mul(&x), x);
    }

    #[test]
    fn unit_vector_times_kronecker_reads_off_a_row() {
        // Selecting row 3 of the 3-fold matrix is the single-EP encoding of
        // the two-bit message 01 in the worked reference example.
        let g = kronecker(3);
        let mut d = vec![0u8; 8];
        d[3] = 1;
        assert_eq!(g.mul_vec_left(&d), vec![1, 1, 1, 1, 0, 0, 0, 0]);
    }

    #[test]
    #[should_panic(expected = "dimension mismatch")]
    fn mul_dimension_mismatch_panics() {
        let a = mat(&[&[1, 0]]);
        let b = mat(&[&[1, 0]]);
        a.mul(&b);
    }

    #[test]
    fn inverse_of_identity() {
        let i4 = BitMatrix::identity(4);
        assert_eq!(i4.inverse().unwrap(), i4);
    }

    #[test]
    fn inverse_of_index_set_submatrix_matches_reference() {
        // G_AA for A = {3,5,6,7} on the 3-fold matrix, and its inverse as it
        // appears as the left factor of the systematic transform.
        let g = kronecker(3);
        let a = [3usize, 5, 6, 7];
        let g_aa = g.submatrix(&a, &a);
        let expected = mat(&[
            &[1, 0, 0, 0],
            &[0, 1, 0, 0],
            &[0, 0, 1, 0],
            &[1, 1, 1, 1],
        ]);
        assert_eq!(g_aa, expected);
        assert_eq!(g_aa.inverse().unwrap(), expected);
    }

    #[test]
    fn inverse_of_random_full_rank_matrix() {
        // Deterministic pseudo-random row operations on I keep full rank.
        let mut a = BitMatrix::identity(8);
        let mut state = 0x9e3779b97f4a7c15u64;
        for _ in 0..200 {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let r1 = (state >> 20) as usize % 8;
            let r2 = (state >> 40) as usize % 8;
            if r1 != r2 {
                for c in 0..8 {
                    let v = a.get(r1, c) ^ a.get(r2, c);
                    a.set(r1, c, v);
                }
            }
        }
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv), BitMatrix::identity(8));
        assert_eq!(inv.mul(&a), BitMatrix::identity(8));
    }

    #[test]
    fn inverse_reports_rank_of_singular_input() {
        let a = mat(&[&[1, 1, 0], &[0, 1, 1], &[1, 0, 1]]); // row3 = row1 + row2
        assert_eq!(a.inverse(), Err(Gf2Error::Singular { rank: 2, dim: 3 }));
    }

    #[test]
    fn systematic_transform_matches_reference_example() {
        let g = kronecker(3);
        let a = [3usize, 5, 6, 7];
        let gm1 = g.select_rows(&a);
        let (sys, perm) = systematic_transform(&gm1, &a).unwrap();
        let expected = mat(&[
            &[1, 0, 0, 0, 1, 1, 1, 0],
            &[0, 1, 0, 0, 1, 1, 0, 1],
            &[0, 0, 1, 0, 1, 0, 1, 1],
            &[0, 0, 0, 1, 0, 1, 1, 1],
        ]);
        assert_eq!(sys, expected);
        assert_eq!(perm.indices(), &[3, 5, 6, 7, 0, 1, 2, 4]);

        // Undoing the permutation recovers the straightened product.
        let product = mat(&[
            &[1, 1, 1, 1, 0, 0, 0, 0],
            &[1, 1, 0, 0, 1, 1, 0, 0],
            &[1, 0, 1, 0, 1, 0, 1, 0],
            &[0, 1, 1, 0, 1, 0, 0, 1],
        ]);
        assert_eq!(perm.inverse().apply(&sys), product);
    }

    #[test]
    fn systematic_transform_of_already_systematic_input() {
        // Row 0 alone: G_AA = [1], nothing to straighten or move.
        let g = kronecker(2);
        let a = [0usize];
        let gm1 = g.select_rows(&a);
        let (sys, perm) = systematic_transform(&gm1, &a).unwrap();
        assert_eq!(sys, gm1);
        assert!(perm.is_identity());
    }

    #[test]
    fn systematic_transform_preserves_row_space() {
        // Row space compared in natural column order via an independent
        // elimination oracle.
        let g = kronecker(4);
        let sets: &[&[usize]] = &[&[7, 11, 13, 14, 15], &[3, 5, 9, 15], &[0, 8, 12, 14]];
        for a in sets {
            let gm1 = g.select_rows(a);
            let (sys, perm) = systematic_transform(&gm1, a).unwrap();
            for k in 0..a.len() {
                assert!(sys.get(k, k), "leading block must be identity");
                for r in 0..a.len() {
                    assert_eq!(sys.get(r, k), r == k);
                }
            }
            let natural = perm.inverse().apply(&sys);
            assert_eq!(
                row_space_fingerprint(&natural),
                row_space_fingerprint(&gm1),
                "row space changed for {a:?}"
            );
        }
    }

    #[test]
    fn systematic_transform_rejects_dependent_rows() {
        let gm1 = mat(&[&[1, 1, 0, 0], &[1, 1, 0, 0]]);
        let err = systematic_transform(&gm1, &[0, 1]).unwrap_err();
        assert_eq!(err, Gf2Error::DependentRows { rank: 1, rows: 2 });
    }

    /// Plain polynomial long division over bit arrays, independent of the
    /// shift-register implementation.
    fn long_division_crc(data: &[u8], degree: usize, poly: u64) -> Vec<u8> {
        let mut dividend: Vec<u8> = data.to_vec();
        dividend.extend(std::iter::repeat_n(0, degree));
        let divisor: Vec<u8> = std::iter::once(1)
            .chain((0..degree).map(|i| ((poly >> (degree - 1 - i)) & 1) as u8))
            .collect();
        for i in 0..data.len() {
            if dividend[i] == 1 {
                for (k, &d) in divisor.iter().enumerate() {
                    dividend[i + k] ^= d;
                }
            }
        }
        dividend[data.len()..].to_vec()
    }

    #[test]
    fn crc_generator_with_zero_length_is_identity() {
        assert_eq!(crc_generator(5, 0, 0).unwrap(), BitMatrix::identity(5));
    }

    #[test]
    fn crc_of_zero_payload_is_zero() {
        let g = crc_generator(8, 8, 0x07).unwrap();
        assert_eq!(g.mul_vec_left(&[0; 8]), vec![0; 16]);
    }

    #[test]
    fn crc_matches_long_division_oracle() {
        let g = crc_generator(8, 8, 0x07).unwrap();
        let mut state = 12345u64;
        for _ in 0..50 {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1);
            let payload: Vec<u8> = (0..8).map(|i| ((state >> (i + 8)) & 1) as u8).collect();
            let word = g.mul_vec_left(&payload);
            assert_eq!(&word[..8], &payload[..], "systematic prefix");
            assert_eq!(&word[8..], long_division_crc(&payload, 8, 0x07));
        }
        assert_eq!(g.rank(), 8, "full row rank");
    }

    #[test]
    fn crc_generator_rejects_degenerate_polynomials() {
        assert!(crc_generator(4, 8, 0x06).is_err()); // zero constant term
        assert!(crc_generator(4, 4, 0x13).is_err()); // does not fit degree
    }

    #[test]
    fn permutation_roundtrip() {
        let p = ColumnPermutation::new(vec![2, 0, 3, 1]);
        let v = [10, 20, 30, 40];
        let gathered = p.apply_slice(&v);
        assert_eq!(gathered, vec![30, 10, 40, 20]);
        assert_eq!(p.inverse().apply_slice(&gathered), v.to_vec());
    }
}
