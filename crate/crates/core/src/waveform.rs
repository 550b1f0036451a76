//! Transmitted chip frames: classic DCSK and the WPT-optimal DCSK waveform.
//!
//! A classic DCSK symbol is `β` reference chips followed by `β` data chips
//! equal to `d·reference`. The WPT-optimal symbol is a single reference chip
//! `x` followed by `β` copies of `d·x`, which concentrates the whole symbol
//! energy into one coherent correlator sum.
//!
//! Symbols are indexed from zero. The delayed second ray needs the tail of
//! the previous symbol, so symbol 0 of every frame acts as warm-up.

use std::io::{self, Write};

use crate::chaos::{ChaosGenerator, DEFAULT_DEGREE};
use crate::error::{argument, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WaveformKind {
    ClassicDcsk,
    WptOptimal,
}

impl WaveformKind {
    pub fn symbol_len(self, beta: u32) -> usize {
        match self {
            Self::ClassicDcsk => 2 * beta as usize,
            Self::WptOptimal => beta as usize + 1,
        }
    }

    /// Largest delay the kind supports: `symbol_len − 1` for classic DCSK and
    /// `β − 1` for the WPT-optimal symbol, whose delayed window must still
    /// contain at least one data chip of the current symbol.
    pub fn max_tau(self, beta: u32) -> usize {
        match self {
            Self::ClassicDcsk => self.symbol_len(beta) - 1,
            Self::WptOptimal => beta as usize - 1,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::ClassicDcsk => "classic-dcsk",
            Self::WptOptimal => "wpt-optimal",
        }
    }
}

impl std::str::FromStr for WaveformKind {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "classic-dcsk" => Ok(Self::ClassicDcsk),
            "wpt-optimal" => Ok(Self::WptOptimal),
            other => Err(argument(format!(
                "unknown waveform kind {other:?} (expected classic-dcsk or wpt-optimal)"
            ))),
        }
    }
}

/// Spreading factor, waveform kind, chaotic-map degree and correlator length.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WaveformSpec {
    beta: u32,
    kind: WaveformKind,
    degree: u32,
    correlator_len: usize,
}

impl WaveformSpec {
    /// Degree-2 map and a correlator spanning the whole symbol.
    pub fn new(beta: u32, kind: WaveformKind) -> Result<Self> {
        if beta == 0 {
            return Err(argument("spreading factor must be >= 1"));
        }
        Ok(Self {
            beta,
            kind,
            degree: DEFAULT_DEGREE,
            correlator_len: kind.symbol_len(beta),
        })
    }

    pub fn with_degree(mut self, degree: u32) -> Result<Self> {
        if degree < 2 {
            return Err(argument(format!("Chebyshev degree must be >= 2, got {degree}")));
        }
        self.degree = degree;
        Ok(self)
    }

    pub fn with_correlator_len(mut self, psi: usize) -> Result<Self> {
        let len = self.symbol_len();
        if psi == 0 || psi > len {
            return Err(argument(format!(
                "correlator length must lie in 1..={len}, got {psi}"
            )));
        }
        self.correlator_len = psi;
        Ok(self)
    }

    pub fn beta(&self) -> u32 {
        self.beta
    }

    pub fn kind(&self) -> WaveformKind {
        self.kind
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn correlator_len(&self) -> usize {
        self.correlator_len
    }

    pub fn symbol_len(&self) -> usize {
        self.kind.symbol_len(self.beta)
    }

    pub fn max_tau(&self) -> usize {
        self.kind.max_tau(self.beta)
    }

    /// Chips of chaotic reference material consumed per symbol.
    pub fn references_per_symbol(&self) -> usize {
        match self.kind {
            WaveformKind::ClassicDcsk => self.beta as usize,
            WaveformKind::WptOptimal => 1,
        }
    }
}

/// A block of transmitted chips together with the bits they carry.
#[derive(Debug, Clone, PartialEq)]
pub struct ChipFrame {
    chips: Vec<f64>,
    bits: Vec<i8>,
    symbol_len: usize,
    kind: WaveformKind,
}

fn check_bits(bits: &[i8]) -> Result<()> {
    if bits.is_empty() {
        return Err(argument("a frame needs at least one information bit"));
    }
    if let Some(b) = bits.iter().find(|b| b.abs() != 1) {
        return Err(argument(format!("information bits must be +1 or -1, got {b}")));
    }
    Ok(())
}

fn check_kind(spec: &WaveformSpec, want: WaveformKind) -> Result<()> {
    if spec.kind != want {
        return Err(argument(format!(
            "waveform spec is {}, builder expects {}",
            spec.kind.label(),
            want.label()
        )));
    }
    Ok(())
}

impl ChipFrame {
    /// Assembles a frame from explicit reference chips, `spec.references_per_symbol()`
    /// of them per bit.
    pub fn from_references(spec: &WaveformSpec, bits: &[i8], references: &[f64]) -> Result<Self> {
        check_bits(bits)?;
        let per = spec.references_per_symbol();
        if references.len() != per * bits.len() {
            return Err(argument(format!(
                "expected {} reference chips for {} bits, got {}",
                per * bits.len(),
                bits.len(),
                references.len()
            )));
        }
        let beta = spec.beta as usize;
        let mut chips = Vec::with_capacity(spec.symbol_len() * bits.len());
        for (&bit, refs) in bits.iter().zip(references.chunks_exact(per)) {
            let d = f64::from(bit);
            match spec.kind {
                WaveformKind::ClassicDcsk => {
                    chips.extend_from_slice(refs);
                    chips.extend(refs.iter().map(|x| d * x));
                }
                WaveformKind::WptOptimal => {
                    let x = refs[0];
                    chips.push(x);
                    chips.extend(std::iter::repeat_n(d * x, beta));
                }
            }
        }
        Ok(Self {
            chips,
            bits: bits.to_vec(),
            symbol_len: spec.symbol_len(),
            kind: spec.kind,
        })
    }

    pub fn chips(&self) -> &[f64] {
        &self.chips
    }

    pub fn bits(&self) -> &[i8] {
        &self.bits
    }

    pub fn symbol_len(&self) -> usize {
        self.symbol_len
    }

    pub fn kind(&self) -> WaveformKind {
        self.kind
    }

    pub fn num_symbols(&self) -> usize {
        self.bits.len()
    }

    pub fn symbol(&self, index: usize) -> Option<&[f64]> {
        let start = index.checked_mul(self.symbol_len)?;
        self.chips.get(start..start + self.symbol_len)
    }

    fn beta(&self) -> u32 {
        match self.kind {
            WaveformKind::ClassicDcsk => (self.symbol_len / 2) as u32,
            WaveformKind::WptOptimal => (self.symbol_len - 1) as u32,
        }
    }

    /// Returns a copy with every chip multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            chips: self.chips.iter().map(|x| c * x).collect(),
            ..self.clone()
        }
    }

    /// Writes `chip_index,value,symbol_index,bit` rows with a header line.
    pub fn write_chip_dump<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "chip_index,value,symbol_index,bit")?;
        for (i, x) in self.chips.iter().enumerate() {
            let symbol = i / self.symbol_len;
            writeln!(out, "{i},{x},{symbol},{}", self.bits[symbol])?;
        }
        Ok(())
    }
}

/// Builds a classic DCSK frame drawing `β` fresh reference chips per bit.
pub fn build_classic_frame(
    spec: &WaveformSpec,
    bits: &[i8],
    generator: &mut ChaosGenerator,
) -> Result<ChipFrame> {
    check_kind(spec, WaveformKind::ClassicDcsk)?;
    check_bits(bits)?;
    let refs: Vec<f64> = (0..spec.beta as usize * bits.len())
        .map(|_| generator.step())
        .collect();
    ChipFrame::from_references(spec, bits, &refs)
}

/// Builds a WPT-optimal frame drawing one fresh reference chip per bit.
pub fn build_wpt_optimal_frame(
    spec: &WaveformSpec,
    bits: &[i8],
    generator: &mut ChaosGenerator,
) -> Result<ChipFrame> {
    check_kind(spec, WaveformKind::WptOptimal)?;
    check_bits(bits)?;
    let refs: Vec<f64> = bits.iter().map(|_| generator.step()).collect();
    ChipFrame::from_references(spec, bits, &refs)
}

/// Dispatches on `spec.kind()`.
pub fn build_frame(
    spec: &WaveformSpec,
    bits: &[i8],
    generator: &mut ChaosGenerator,
) -> Result<ChipFrame> {
    match spec.kind {
        WaveformKind::ClassicDcsk => build_classic_frame(spec, bits, generator),
        WaveformKind::WptOptimal => build_wpt_optimal_frame(spec, bits, generator),
    }
}

/// The `τ`-delayed transmitted stream `s_{k−τ}` over the window of symbol
/// `symbol_index`.
///
/// The first `τ` entries are the tail of the previous symbol, so
/// `symbol_index` must be at least 1.
pub fn delayed_view(frame: &ChipFrame, tau: usize, symbol_index: usize) -> Result<&[f64]> {
    let max_tau = frame.kind.max_tau(frame.beta());
    if tau > max_tau {
        return Err(argument(format!(
            "delay {tau} exceeds the maximum {max_tau} for a {} symbol of length {}",
            frame.kind.label(),
            frame.symbol_len
        )));
    }
    if symbol_index == 0 {
        return Err(argument(
            "symbol 0 has no predecessor; the delayed ray needs the previous symbol",
        ));
    }
    if symbol_index >= frame.num_symbols() {
        return Err(argument(format!(
            "symbol index {symbol_index} out of range for a {}-symbol frame",
            frame.num_symbols()
        )));
    }
    let start = symbol_index * frame.symbol_len - tau;
    Ok(&frame.chips[start..start + frame.symbol_len])
}
