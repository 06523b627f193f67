//! Polarized element-pair (EP) codes for polarization-adjusted finite-field
//! multiple access (PA-FFMA) over a real-valued Gaussian multiple-access
//! channel (GMAC).
//!
//! The crate implements the full simulation chain:
//!
//! * [`gf2`] — bit-packed GF(2) matrix algebra (Kronecker matrices,
//!   inversion, systematic transforms, CRC generator matrices);
//! * [`code`] — EP code definition and the parallel-mode, CRC-aided,
//!   systematic multiuser encoder;
//! * [`channel`] — power allocation, BPSK-style modulation with zero
//!   elision, GMAC superposition with AWGN, and LLR demodulation;
//! * [`capacity`] — capacity formulas for the cascaded binary-input /
//!   multiple-input channel model and power-split optimization;
//! * [`construct`] — Monte Carlo bit-channel construction of the EP index
//!   set with a genie-aided successive cancellation pass;
//! * [`decode`] — CRC-aided successive cancellation list decoding and the
//!   two-phase Top-L bifurcated minimum-distance decoder;
//! * [`sim`] — seeded, reproducible experiment campaigns (BER sweeps,
//!   capacity curves, power-split search, construction) with CSV output.
//!
//! Runnable entry points for each capability live in the crate's
//! `examples/` directory; a thin `pa-ffma` binary exposes the same
//! campaigns as CLI subcommands.

pub mod capacity;
pub mod channel;
pub mod code;
pub mod construct;
pub mod decode;
pub mod gf2;
pub mod numeric;
