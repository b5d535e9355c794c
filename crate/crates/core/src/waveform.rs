//! Transmit frames for DCSK, unmodulated chaos, SR-DCSK and the WPT-optimal
//! SR-DCSK symbol.

use rand::Rng;
use std::fmt;
use std::str::FromStr;

use crate::chaos::{self, Bit, ChaosConfig, ChipSequence};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    Dcsk,
    Unmodulated,
    SrDcsk,
    OptimalSr,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::Dcsk => "dcsk",
            Scheme::Unmodulated => "unmodulated",
            Scheme::SrDcsk => "srdcsk",
            Scheme::OptimalSr => "optimal_sr",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "dcsk" => Ok(Scheme::Dcsk),
            "unmodulated" | "um" => Ok(Scheme::Unmodulated),
            "srdcsk" | "sr_dcsk" | "sr" => Ok(Scheme::SrDcsk),
            "optimal_sr" | "optimalsr" | "opt_sr" => Ok(Scheme::OptimalSr),
            other => Err(format!(
                "unknown scheme `{other}` (expected dcsk, unmodulated, srdcsk or optimal_sr)"
            )),
        }
    }
}

/// A transmit frame scheme with its spreading parameters.
///
/// `beta_r` is only meaningful for [`Scheme::SrDcsk`]; it is forced to 1 for
/// [`Scheme::OptimalSr`] and to 0 elsewhere.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WaveformSpec {
    scheme: Scheme,
    beta: usize,
    beta_r: usize,
}

impl WaveformSpec {
    pub fn new(scheme: Scheme, beta: usize, beta_r: usize) -> Result<Self> {
        if beta == 0 {
            return Err(Error::param("beta", "spreading factor must be at least 1"));
        }
        let beta_r = match scheme {
            Scheme::Dcsk | Scheme::Unmodulated => 0,
            Scheme::OptimalSr => 1,
            Scheme::SrDcsk => {
                if beta_r == 0 {
                    return Err(Error::param(
                        "beta_r",
                        "an SR-DCSK frame needs at least one reference chip",
                    ));
                }
                if !beta.is_multiple_of(beta_r) {
                    return Err(Error::NotDivisible { beta, beta_r });
                }
                beta_r
            }
        };
        Ok(Self {
            scheme,
            beta,
            beta_r,
        })
    }

    pub fn dcsk(beta: usize) -> Result<Self> {
        Self::new(Scheme::Dcsk, beta, 0)
    }

    pub fn unmodulated(beta: usize) -> Result<Self> {
        Self::new(Scheme::Unmodulated, beta, 0)
    }

    pub fn srdcsk(beta: usize, beta_r: usize) -> Result<Self> {
        Self::new(Scheme::SrDcsk, beta, beta_r)
    }

    pub fn optimal_sr(beta: usize) -> Result<Self> {
        Self::new(Scheme::OptimalSr, beta, 1)
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn beta(&self) -> usize {
        self.beta
    }

    pub fn beta_r(&self) -> usize {
        self.beta_r
    }

    /// Number of data copies of the reference, `beta / beta_r` (1 for DCSK).
    pub fn zeta(&self) -> usize {
        match self.scheme {
            Scheme::Dcsk => 1,
            Scheme::Unmodulated => 0,
            Scheme::SrDcsk | Scheme::OptimalSr => self.beta / self.beta_r,
        }
    }

    pub fn frame_length(&self) -> usize {
        match self.scheme {
            Scheme::Dcsk | Scheme::Unmodulated => 2 * self.beta,
            Scheme::SrDcsk | Scheme::OptimalSr => self.beta_r + self.beta,
        }
    }

    /// Chaotic chips drawn per symbol.
    pub fn reference_length(&self) -> usize {
        match self.scheme {
            Scheme::Dcsk => self.beta,
            Scheme::Unmodulated => 2 * self.beta,
            Scheme::SrDcsk | Scheme::OptimalSr => self.beta_r,
        }
    }

    pub fn is_modulated(&self) -> bool {
        self.scheme != Scheme::Unmodulated
    }

    /// Writes the frame built from `reference` and `bit` into `out`.
    pub(crate) fn assemble_into(&self, reference: &[f64], bit: Option<Bit>, out: &mut Vec<f64>) {
        out.clear();
        out.extend_from_slice(reference);
        if let Some(bit) = bit.filter(|_| self.is_modulated()) {
            let d = bit.sign();
            for _ in 0..self.zeta() {
                out.extend(reference.iter().map(|x| d * x));
            }
        }
    }

    /// Draws the bit and chips for one symbol and assembles the frame.
    pub fn random_frame<R: Rng + ?Sized>(&self, chaos: &ChaosConfig, rng: &mut R) -> Frame {
        let bit = self.is_modulated().then(|| chaos::random_bit(rng));
        let mut reference = vec![0.0; self.reference_length()];
        chaos::fill_reference(&mut reference, chaos, rng);
        let mut samples = Vec::with_capacity(self.frame_length());
        self.assemble_into(&reference, bit, &mut samples);
        Frame {
            samples,
            bit,
            spec: *self,
        }
    }
}

impl fmt::Display for WaveformSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.scheme {
            Scheme::SrDcsk => write!(
                f,
                "{}(beta={}, beta_r={})",
                self.scheme, self.beta, self.beta_r
            ),
            _ => write!(f, "{}(beta={})", self.scheme, self.beta),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    samples: Vec<f64>,
    bit: Option<Bit>,
    spec: WaveformSpec,
}

impl Frame {
    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn bit(&self) -> Option<Bit> {
        self.bit
    }

    pub fn spec(&self) -> &WaveformSpec {
        &self.spec
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|s| s * s).sum()
    }
}

fn build(spec: WaveformSpec, reference: &[f64], bit: Option<Bit>) -> Frame {
    let mut samples = Vec::with_capacity(spec.frame_length());
    spec.assemble_into(reference, bit, &mut samples);
    Frame { samples, bit, spec }
}

/// `[x_1..x_beta, d x_1..d x_beta]`.
pub fn frame_dcsk(reference: &ChipSequence, bit: Bit) -> Result<Frame> {
    let spec = WaveformSpec::dcsk(reference.len())?;
    Ok(build(spec, reference.as_slice(), Some(bit)))
}

/// Unmodulated chaotic symbol: the `2 beta` chips passed through unchanged.
pub fn frame_unmodulated(chips: &ChipSequence, beta: usize) -> Result<Frame> {
    let spec = WaveformSpec::unmodulated(beta)?;
    if chips.len() != 2 * beta {
        return Err(Error::LengthMismatch {
            what: "unmodulated chips",
            expected: 2 * beta,
            actual: chips.len(),
        });
    }
    Ok(build(spec, chips.as_slice(), None))
}

/// Reference of `beta_r` chips followed by `beta / beta_r` copies of `d * reference`.
pub fn frame_srdcsk(reference: &ChipSequence, bit: Bit, beta: usize) -> Result<Frame> {
    if reference.is_empty() {
        return Err(Error::Empty("SR-DCSK reference"));
    }
    let spec = WaveformSpec::srdcsk(beta, reference.len())?;
    Ok(build(spec, reference.as_slice(), Some(bit)))
}

/// `[x_1, d x_1, ..., d x_1]` with `beta` data chips.
pub fn frame_optimal_sr(reference_chip: f64, bit: Bit, beta: usize) -> Result<Frame> {
    if !(reference_chip.abs() <= 1.0) {
        return Err(Error::ChaosDomain(reference_chip));
    }
    let spec = WaveformSpec::optimal_sr(beta)?;
    Ok(build(spec, &[reference_chip], Some(bit)))
}
