//! Polarized EP codes and the parallel-mode multiuser encoder.
//!
//! An EP code assigns each user a block of element pairs, i.e. rows of the
//! Kronecker matrix selected by the index set. Encoding a user's bits sums
//! the owned generator rows selected by the one-bits (the EP switch view);
//! with the systematic generator the user's block reappears verbatim in the
//! information section of the output element, and the GF(2) sum of all
//! users' output elements is again a codeword of the underlying transform.

use crate::gf2::{
    crc_generator, crc_remainder, kronecker, systematic_transform, BitMatrix, ColumnPermutation,
    Gf2Error,
};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CodeError {
    #[error("EP count {ep_count} = users * (info + crc) exceeds {dof} degrees of freedom")]
    TooManyEps { ep_count: usize, dof: usize },
    #[error("index set must hold {expected} sorted unique indices below {dof}")]
    BadIndexSet { expected: usize, dof: usize },
    #[error("fold count must be at least 1")]
    BadFoldCount,
    #[error(transparent)]
    Gf2(#[from] Gf2Error),
}

/// One user's encoded output element: an m-tuple over GF(2) in transmit
/// order, split into an information section of length M and a parity
/// section of length R = m - M.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OutputElement {
    bits: Vec<u8>,
    info_len: usize,
}

impl OutputElement {
    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn info(&self) -> &[u8] {
        &self.bits[..self.info_len]
    }

    pub fn parity(&self) -> &[u8] {
        &self.bits[self.info_len..]
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }
}

/// Component-wise GF(2) sum of output elements — the multiuser FFSP block.
///
/// # Panics
///
/// Panics on an empty input or mismatched lengths.
pub fn ffsp_sum(elements: &[OutputElement]) -> OutputElement {
    let first = elements.first().expect("ffsp_sum needs at least one element");
    let mut bits = first.bits.clone();
    for e in &elements[1..] {
        assert_eq!(e.bits.len(), bits.len(), "output element length mismatch");
        for (b, &x) in bits.iter_mut().zip(&e.bits) {
            *b ^= x;
        }
    }
    OutputElement {
        bits,
        info_len: first.info_len,
    }
}

/// Serialized form of a code specification: the parameters plus the index
/// set; the generator matrices are rebuilt on load.
#[derive(Serialize, Deserialize, Clone)]
struct SpecDocument {
    kappa: usize,
    users: usize,
    info_bits: usize,
    crc_len: usize,
    crc_poly: u64,
    index_set: Vec<usize>,
}

/// A polarized EP code: system parameters, the index set, and the derived
/// generator matrices in both non-systematic and systematic form.
#[derive(Clone, Serialize, Deserialize)]
#[serde(try_from = "SpecDocument", into = "SpecDocument")]
pub struct EpCodeSpec {
    kappa: usize,
    dof: usize,
    users: usize,
    info_bits: usize,
    crc_len: usize,
    crc_poly: u64,
    block_len: usize,
    ep_count: usize,
    parity_len: usize,
    index_set: Vec<usize>,
    g_m1: BitMatrix,
    g_msym: BitMatrix,
    g_crc: BitMatrix,
    g_full: BitMatrix,
    perm: ColumnPermutation,
    inv_perm: ColumnPermutation,
}

impl EpCodeSpec {
    /// Builds a code from its parameters and an explicit index set.
    ///
    /// `index_set` holds the 0-based Kronecker row indices assigned as EPs,
    /// sorted ascending; its length must equal `users * (info_bits +
    /// crc_len)`. Users are indexed 0-based throughout.
    pub fn new(
        kappa: usize,
        users: usize,
        info_bits: usize,
        crc_len: usize,
        crc_poly: u64,
        index_set: Vec<usize>,
    ) -> Result<Self, CodeError> {
        if kappa == 0 {
            return Err(CodeError::BadFoldCount);
        }
        assert!(users >= 1, "at least one user");
        let dof = 1usize << kappa;
        let block_len = info_bits + crc_len;
        let ep_count = users * block_len;
        if ep_count > dof {
            return Err(CodeError::TooManyEps { ep_count, dof });
        }
        let sorted_unique = index_set.windows(2).all(|w| w[0] < w[1]);
        if index_set.len() != ep_count
            || !sorted_unique
            || index_set.iter().any(|&i| i >= dof)
        {
            return Err(CodeError::BadIndexSet {
                expected: ep_count,
                dof,
            });
        }
        let g = kronecker(kappa);
        let g_m1 = g.select_rows(&index_set);
        let (g_msym, perm) = systematic_transform(&g_m1, &index_set)?;
        let per_user_crc = crc_generator(info_bits, crc_len, crc_poly)?;
        let g_crc = block_diagonal(&per_user_crc, users, ep_count);
        let g_full = if ep_count == 0 {
            BitMatrix::zeros(0, dof)
        } else {
            g_crc.mul(&g_msym)
        };
        let inv_perm = perm.inverse();
        Ok(EpCodeSpec {
            kappa,
            dof,
            users,
            info_bits,
            crc_len,
            crc_poly,
            block_len,
            ep_count,
            parity_len: dof - ep_count,
            index_set,
            g_m1,
            g_msym,
            g_crc,
            g_full,
            perm,
            inv_perm,
        })
    }

    pub fn kappa(&self) -> usize {
        self.kappa
    }

    /// Frame length m = 2^kappa.
    pub fn dof(&self) -> usize {
        self.dof
    }

    pub fn users(&self) -> usize {
        self.users
    }

    /// K, data bits per user (CRC excluded).
    pub fn info_bits(&self) -> usize {
        self.info_bits
    }

    pub fn crc_len(&self) -> usize {
        self.crc_len
    }

    pub fn crc_poly(&self) -> u64 {
        self.crc_poly
    }

    /// B = K + C_L, the per-user EP block length.
    pub fn block_len(&self) -> usize {
        self.block_len
    }

    /// M = J * B, the total EP count / information-section length.
    pub fn ep_count(&self) -> usize {
        self.ep_count
    }

    /// R = m - M.
    pub fn parity_len(&self) -> usize {
        self.parity_len
    }

    pub fn index_set(&self) -> &[usize] {
        &self.index_set
    }

    /// Non-systematic generator: the Kronecker rows selected by the index
    /// set, in natural column order.
    pub fn generator_nonsystematic(&self) -> &BitMatrix {
        &self.g_m1
    }

    /// Systematic generator `[I | Q]` in transmit column order.
    pub fn generator_systematic(&self) -> &BitMatrix {
        &self.g_msym
    }

    /// Block-diagonal per-user CRC encoding matrix, (J*K) x M.
    pub fn generator_crc(&self) -> &BitMatrix {
        &self.g_crc
    }

    /// CRC-aided systematic generator, (J*K) x m in transmit order.
    pub fn generator_full(&self) -> &BitMatrix {
        &self.g_full
    }

    /// Column permutation from natural to transmit order: transmit position
    /// p carries natural position `permutation().indices()[p]`.
    pub fn permutation(&self) -> &ColumnPermutation {
        &self.perm
    }

    /// Row indices (equivalently, transmit-order information positions) of
    /// the EPs owned by 0-based `user`.
    pub fn owned_rows(&self, user: usize) -> std::ops::Range<usize> {
        assert!(user < self.users, "user index {user} out of range");
        user * self.block_len..(user + 1) * self.block_len
    }

    /// Which user owns transmit-order information position `pos`.
    pub fn owner_of(&self, pos: usize) -> usize {
        assert!(pos < self.ep_count, "not an information position");
        pos / self.block_len
    }

    /// Appends the per-user CRC to `bits`, forming the B-bit EP block.
    pub fn attach_crc(&self, bits: &[u8]) -> Vec<u8> {
        assert_eq!(bits.len(), self.info_bits, "expected K data bits");
        assert!(bits.iter().all(|&b| b <= 1), "bit values must be 0 or 1");
        let mut block = bits.to_vec();
        if self.crc_len > 0 {
            block.extend(crc_remainder(bits, self.crc_len, self.crc_poly));
        }
        block
    }

    /// Checks a B-bit block's CRC (trivially true when C_L = 0).
    pub fn crc_ok(&self, block: &[u8]) -> bool {
        assert_eq!(block.len(), self.block_len);
        if self.crc_len == 0 {
            return true;
        }
        crc_remainder(&block[..self.info_bits], self.crc_len, self.crc_poly)
            == block[self.info_bits..]
    }

    /// Systematic CRC-aided encoding of one user's K data bits.
    pub fn encode_user(&self, user: usize, bits: &[u8]) -> OutputElement {
        let block = self.attach_crc(bits);
        self.encode_block(user, &block)
    }

    /// Systematic encoding of a full B-bit EP block (no CRC recomputation):
    /// the GF(2) sum of the owned systematic generator rows selected by the
    /// one-bits.
    pub fn encode_block(&self, user: usize, block: &[u8]) -> OutputElement {
        OutputElement {
            bits: self.sum_owned_rows(&self.g_msym, user, block),
            info_len: self.ep_count,
        }
    }

    /// Non-systematic encoding of one user's K data bits over the raw
    /// Kronecker rows (exposed for analysis; the pipeline transmits the
    /// systematic form).
    pub fn encode_user_nonsystematic(&self, user: usize, bits: &[u8]) -> OutputElement {
        let block = self.attach_crc(bits);
        self.encode_block_nonsystematic(user, &block)
    }

    /// Non-systematic encoding of a full B-bit EP block.
    pub fn encode_block_nonsystematic(&self, user: usize, block: &[u8]) -> OutputElement {
        OutputElement {
            bits: self.sum_owned_rows(&self.g_m1, user, block),
            info_len: self.ep_count,
        }
    }

    fn sum_owned_rows(&self, generator: &BitMatrix, user: usize, block: &[u8]) -> Vec<u8> {
        let rows = self.owned_rows(user);
        assert_eq!(block.len(), self.block_len, "expected B block bits");
        assert!(block.iter().all(|&b| b <= 1), "bit values must be 0 or 1");
        let mut selector = vec![0u8; self.ep_count];
        selector[rows].copy_from_slice(block);
        generator.mul_vec_left(&selector)
    }

    /// Packs all users' data bits into the length-M information block
    /// w = (b_0 || crc_0, ..., b_{J-1} || crc_{J-1}).
    pub fn pack_w(&self, user_bits: &[Vec<u8>]) -> Vec<u8> {
        assert_eq!(user_bits.len(), self.users, "expected J bit blocks");
        let mut w = Vec::with_capacity(self.ep_count);
        for bits in user_bits {
            w.extend(self.attach_crc(bits));
        }
        w
    }

    /// Splits an information block back into per-user data bits (CRC bits
    /// dropped).
    pub fn unpack_w(&self, w: &[u8]) -> Vec<Vec<u8>> {
        assert_eq!(w.len(), self.ep_count, "expected M information bits");
        (0..self.users)
            .map(|j| w[self.owned_rows(j)][..self.info_bits].to_vec())
            .collect()
    }

    /// True when transmit position `pos` is permanently zero for `user`:
    /// an information position outside the user's own block. Parity
    /// positions are always transmitted.
    pub fn permanently_zero(&self, user: usize, pos: usize) -> bool {
        pos < self.ep_count && !self.owned_rows(user).contains(&pos)
    }

    /// Reorders a natural-order vector into transmit order.
    pub fn to_transmit_order<T: Copy>(&self, natural: &[T]) -> Vec<T> {
        self.perm.apply_slice(natural)
    }

    /// Reorders a transmit-order vector into natural order.
    pub fn to_natural_order<T: Copy>(&self, transmit: &[T]) -> Vec<T> {
        self.inv_perm.apply_slice(transmit)
    }

    /// Natural-order frozen mask: true outside the index set.
    pub fn frozen_mask(&self) -> Vec<bool> {
        let mut frozen = vec![true; self.dof];
        for &i in &self.index_set {
            frozen[i] = false;
        }
        frozen
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

impl std::fmt::Debug for EpCodeSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("EpCodeSpec")
            .field("kappa", &self.kappa)
            .field("users", &self.users)
            .field("info_bits", &self.info_bits)
            .field("crc_len", &self.crc_len)
            .field("ep_count", &self.ep_count)
            .field("parity_len", &self.parity_len)
            .finish()
    }
}

impl TryFrom<SpecDocument> for EpCodeSpec {
    type Error = CodeError;

    fn try_from(doc: SpecDocument) -> Result<Self, Self::Error> {
        EpCodeSpec::new(
            doc.kappa,
            doc.users,
            doc.info_bits,
            doc.crc_len,
            doc.crc_poly,
            doc.index_set,
        )
    }
}

impl From<EpCodeSpec> for SpecDocument {
    fn from(spec: EpCodeSpec) -> Self {
        SpecDocument {
            kappa: spec.kappa,
            users: spec.users,
            info_bits: spec.info_bits,
            crc_len: spec.crc_len,
            crc_poly: spec.crc_poly,
            index_set: spec.index_set,
        }
    }
}

/// J copies of `block` along the diagonal, padded to `cols` columns total.
fn block_diagonal(block: &BitMatrix, copies: usize, cols: usize) -> BitMatrix {
    let rows = block.rows() * copies;
    let mut out = BitMatrix::zeros(rows, cols);
    for u in 0..copies {
        for r in 0..block.rows() {
            for c in 0..block.cols() {
                if block.get(r, c) {
                    out.set(u * block.rows() + r, u * block.cols() + c, true);
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    /// The two-user reference code on the 3-fold transform: index set
    /// {3,5,6,7}, two bits per user, no CRC.
    fn two_user_code() -> EpCodeSpec {
        EpCodeSpec::new(3, 2, 2, 0, 0, vec![3, 5, 6, 7]).unwrap()
    }

    #[test]
    fn ep_assignment_is_contiguous_blocks() {
        let spec = two_user_code();
        assert_eq!(spec.owned_rows(0), 0..2);
        assert_eq!(spec.owned_rows(1), 2..4);

        let single = EpCodeSpec::new(3, 1, 4, 0, 0, vec![3, 5, 6, 7]).unwrap();
        assert_eq!(single.owned_rows(0), 0..4);
    }

    #[test]
    #[should_panic(expected = "out of range")]
    fn ep_assignment_rejects_bad_user() {
        two_user_code().owned_rows(2);
    }

    #[test]
    fn nonsystematic_encoding_selects_kronecker_rows() {
        // Single user owning two EPs, rows 3 and 5 of the 3-fold transform.
        // The three nonzero messages select row 3, row 5, and their sum.
        let code = EpCodeSpec::new(3, 1, 2, 0, 0, vec![3, 5]).unwrap();
        assert_eq!(
            code.encode_block_nonsystematic(0, &[1, 0]).bits(),
            &[1, 1, 1, 1, 0, 0, 0, 0]
        );
        assert_eq!(
            code.encode_block_nonsystematic(0, &[0, 1]).bits(),
            &[1, 1, 0, 0, 1, 1, 0, 0]
        );
        assert_eq!(
            code.encode_block_nonsystematic(0, &[1, 1]).bits(),
            &[0, 0, 1, 1, 1, 1, 0, 0]
        );
        assert_eq!(
            code.encode_block_nonsystematic(0, &[0, 0]).bits(),
            &[0; 8]
        );
    }

    #[test]
    fn systematic_encoding_matches_reference_vectors() {
        let spec = two_user_code();
        let c1 = spec.encode_user(0, &[1, 0]);
        assert_eq!(c1.bits(), &[1, 0, 0, 0, 1, 1, 1, 0]);
        let c2 = spec.encode_user(1, &[0, 1]);
        assert_eq!(c2.bits(), &[0, 0, 0, 1, 0, 1, 1, 1]);
    }

    #[test]
    fn zero_bits_encode_to_zero() {
        let spec = two_user_code();
        assert_eq!(spec.encode_user(0, &[0, 0]).bits(), &[0; 8]);
    }

    #[test]
    fn ffsp_sum_of_reference_pair() {
        let spec = two_user_code();
        let c1 = spec.encode_user(0, &[1, 0]);
        let c2 = spec.encode_user(1, &[0, 1]);
        let v = ffsp_sum(&[c1.clone(), c2]);
        assert_eq!(v.bits(), &[1, 0, 0, 1, 1, 0, 0, 1]);
        assert_eq!(ffsp_sum(&[c1.clone()]), c1);
    }

    #[test]
    fn ffsp_equals_w_times_generator_and_permuted_polar_transform() {
        // Three routes to the same FFSP block: per-user encode + XOR,
        // payload times the CRC-aided systematic generator, and the polar
        // transform of the frozen-extended input, gathered into transmit
        // order.
        let spec = EpCodeSpec::new(4, 2, 3, 2, 0x3, vec![5, 6, 7, 9, 10, 11, 12, 13, 14, 15]).unwrap();
        let g = kronecker(4);
        let a = spec.index_set().to_vec();
        let g_aa = g.submatrix(&a, &a);
        let g_aa_inv = g_aa.inverse().unwrap();

        let mut state = 7u64;
        for _ in 0..200 {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1);
            let user_bits: Vec<Vec<u8>> = (0..2)
                .map(|u| (0..3).map(|k| ((state >> (u * 11 + k)) & 1) as u8).collect())
                .collect();

            let elements: Vec<OutputElement> = (0..2)
                .map(|u| spec.encode_user(u, &user_bits[u]))
                .collect();
            let via_sum = ffsp_sum(&elements);

            let payload: Vec<u8> = user_bits.concat();
            let via_full = spec.generator_full().mul_vec_left(&payload);

            let w = spec.pack_w(&user_bits);
            let d_active = g_aa_inv.mul_vec_left(&w);
            let mut d = vec![0u8; spec.dof()];
            for (k, &i) in a.iter().enumerate() {
                d[i] = d_active[k];
            }
            let v_natural = g.mul_vec_left(&d);
            let via_polar = spec.to_transmit_order(&v_natural);

            assert_eq!(via_sum.bits(), &via_full[..]);
            assert_eq!(via_sum.bits(), &via_polar[..]);
        }
    }

    #[test]
    fn pack_and_unpack_roundtrip() {
        let spec = two_user_code();
        let w = spec.pack_w(&[vec![1, 0], vec![0, 1]]);
        assert_eq!(w, vec![1, 0, 0, 1]);
        assert_eq!(spec.unpack_w(&w), vec![vec![1, 0], vec![0, 1]]);
        assert_eq!(spec.pack_w(&[vec![0, 0], vec![0, 0]]), vec![0; 4]);

        let crc_spec = EpCodeSpec::new(4, 2, 3, 2, 0x3, vec![5, 6, 7, 9, 10, 11, 12, 13, 14, 15]).unwrap();
        let bits = vec![vec![1, 1, 0], vec![0, 1, 1]];
        let packed = crc_spec.pack_w(&bits);
        assert_eq!(packed.len(), crc_spec.ep_count());
        assert_eq!(crc_spec.unpack_w(&packed), bits);
    }

    #[test]
    fn systematic_property_info_section_carries_w() {
        let spec = EpCodeSpec::new(4, 2, 3, 2, 0x3, vec![5, 6, 7, 9, 10, 11, 12, 13, 14, 15]).unwrap();
        let user_bits = vec![vec![1, 0, 1], vec![1, 1, 0]];
        let w = spec.pack_w(&user_bits);
        let elements: Vec<OutputElement> = (0..2)
            .map(|u| spec.encode_user(u, &user_bits[u]))
            .collect();
        let v = ffsp_sum(&elements);
        assert_eq!(v.info(), &w[..]);
    }

    #[test]
    fn per_user_support_stays_in_own_block() {
        let spec = EpCodeSpec::new(4, 3, 2, 0, 0, vec![7, 9, 10, 11, 13, 14]).unwrap();
        for user in 0..3 {
            for msg in 0..4u8 {
                let bits = [msg & 1, (msg >> 1) & 1];
                let c = spec.encode_user(user, &bits);
                for pos in 0..spec.ep_count() {
                    if !spec.owned_rows(user).contains(&pos) {
                        assert_eq!(c.info()[pos], 0, "foreign block must stay zero");
                        assert!(spec.permanently_zero(user, pos));
                    } else {
                        assert!(!spec.permanently_zero(user, pos));
                    }
                }
            }
        }
    }

    #[test]
    fn sum_pattern_map_is_injective() {
        // All information blocks produce distinct FFSPs: the CRC-aided
        // systematic generator has full row rank.
        let spec = EpCodeSpec::new(5, 4, 5, 0, 0, (12..32).collect()).unwrap();
        assert_eq!(spec.ep_count(), 20);
        let mut seen = std::collections::HashSet::new();
        for msg in 0u32..1 << 20 {
            let w: Vec<u8> = (0..20).map(|k| ((msg >> k) & 1) as u8).collect();
            let v = spec.generator_systematic().mul_vec_left(&w);
            let mut packed = 0u64;
            for (i, &b) in v.iter().enumerate() {
                packed |= (b as u64) << i;
            }
            assert!(seen.insert(packed), "collision at message {msg}");
        }
        assert_eq!(seen.len(), 1 << 20);
    }

    #[test]
    fn crc_aided_generator_has_full_row_rank() {
        let spec = EpCodeSpec::new(5, 2, 6, 4, 0x3, (18..38).collect::<Vec<_>>())
            .unwrap_err();
        // 2 * 10 = 20 EPs need indices below 32; rebuild with a valid set.
        assert!(matches!(spec, CodeError::BadIndexSet { .. }));
        let spec = EpCodeSpec::new(5, 2, 6, 4, 0x3, (12..32).collect()).unwrap();
        assert_eq!(spec.generator_full().rows(), 12);
        assert_eq!(spec.generator_full().rank(), 12);
    }

    #[test]
    fn crc_blocks_verify_and_detect_corruption() {
        let spec = EpCodeSpec::new(5, 2, 6, 4, 0x3, (12..32).collect()).unwrap();
        let block = spec.attach_crc(&[1, 0, 1, 1, 0, 0]);
        assert!(spec.crc_ok(&block));
        let mut bad = block.clone();
        bad[2] ^= 1;
        assert!(!spec.crc_ok(&bad));
    }

    #[test]
    fn spec_json_roundtrip() {
        let spec = EpCodeSpec::new(4, 2, 3, 2, 0x3, vec![5, 6, 7, 9, 10, 11, 12, 13, 14, 15]).unwrap();
        let text = spec.to_json();
        let back = EpCodeSpec::from_json(&text).unwrap();
        assert_eq!(back.index_set(), spec.index_set());
        assert_eq!(back.generator_systematic(), spec.generator_systematic());
        assert_eq!(back.crc_poly(), spec.crc_poly());
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        assert!(matches!(
            EpCodeSpec::new(2, 3, 2, 0, 0, vec![0, 1, 2, 3]),
            Err(CodeError::TooManyEps { .. })
        ));
        assert!(matches!(
            EpCodeSpec::new(3, 2, 2, 0, 0, vec![5, 3, 6, 7]),
            Err(CodeError::BadIndexSet { .. })
        ));
        assert!(matches!(
            EpCodeSpec::new(0, 1, 1, 0, 0, vec![0]),
            Err(CodeError::BadFoldCount)
        ));
    }
}
