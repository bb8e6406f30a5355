use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::{riemann_zeta, riemann_zeta_derivative, EULER_GAMMA};

/// Laurent data of a zeta function at one argument.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResFp {
    pub residue: f64,
    pub finite_part: f64,
}

impl ResFp {
    pub fn regular(value: f64) -> Self {
        ResFp {
            residue: 0.0,
            finite_part: value,
        }
    }
}

/// One tabulated point of the base zeta function.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZetaPoint {
    pub s: f64,
    pub residue: f64,
    pub finite_part: f64,
}

/// On-disk zeta data of a user-supplied base manifold.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZetaDataFile {
    pub d: u32,
    pub zero_mode_degeneracy: u32,
    pub points: Vec<ZetaPoint>,
    pub zeta0: f64,
    pub zeta0_prime: f64,
    pub heat_coeffs: Vec<f64>,
}

/// Nonzero part of the base spectrum: eigenvalues `nu^2` with multiplicity.
#[derive(Clone, Debug, PartialEq)]
pub enum Spectrum {
    /// `nu = n / R`, multiplicity 2, for `n >= 1`.
    Circle { radius: f64 },
    /// Explicit finite list in ascending `nu`.
    Table(Vec<(f64, u64)>),
}

impl Spectrum {
    /// All levels with `nu <= nu_max`, ascending. Errors if a finite table ends
    /// before `nu_max`.
    pub fn levels_up_to(&self, nu_max: f64) -> Result<Vec<(f64, u64)>> {
        match self {
            Spectrum::Circle { radius } => {
                let n_max = (nu_max * radius + 1e-9).floor() as u64;
                Ok((1..=n_max).map(|n| (n as f64 / radius, 2)).collect())
            }
            Spectrum::Table(levels) => {
                let last = levels.last().map(|l| l.0).unwrap_or(0.0);
                if last < nu_max {
                    return Err(Error::InsufficientSpectrum {
                        needed: nu_max,
                        available: last,
                    });
                }
                Ok(levels.iter().copied().filter(|l| l.0 <= nu_max).collect())
            }
        }
    }

    /// The first `count` levels.
    pub fn first_levels(&self, count: usize) -> Result<Vec<(f64, u64)>> {
        match self {
            Spectrum::Circle { radius } => Ok((1..=count as u64).map(|n| (n as f64 / radius, 2)).collect()),
            Spectrum::Table(levels) => {
                if levels.len() < count {
                    return Err(Error::InsufficientSpectrum {
                        needed: count as f64,
                        available: levels.len() as f64,
                    });
                }
                Ok(levels[..count].to_vec())
            }
        }
    }

    /// Parses CSV with header `nu,multiplicity`.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::InvalidData("empty spectrum file".into()))?;
        let cols: Vec<&str> = header.split(',').map(str::trim).collect();
        if cols != ["nu", "multiplicity"] {
            return Err(Error::InvalidData(format!(
                "spectrum header must be `nu,multiplicity`, got `{header}`"
            )));
        }
        let mut levels = Vec::new();
        let mut prev = 0.0;
        for (lineno, line) in lines.enumerate() {
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            let parse_err = || Error::InvalidData(format!("spectrum line {}: `{line}`", lineno + 2));
            if fields.len() != 2 {
                return Err(parse_err());
            }
            let nu: f64 = fields[0].parse().map_err(|_| parse_err())?;
            let mult: u64 = fields[1].parse().map_err(|_| parse_err())?;
            if !(nu > 0.0 && nu.is_finite()) || mult == 0 || nu < prev {
                return Err(Error::InvalidData(format!(
                    "spectrum line {}: nu must be positive and ascending, multiplicity positive",
                    lineno + 2
                )));
            }
            prev = nu;
            levels.push((nu, mult));
        }
        Ok(Spectrum::Table(levels))
    }

    pub fn to_csv(levels: &[(f64, u64)]) -> String {
        let mut s = String::from("nu,multiplicity\n");
        for (nu, m) in levels {
            s.push_str(&format!("{nu},{m}\n"));
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq)]
enum ZetaSource {
    Circle { radius: f64 },
    Table(Vec<ZetaPoint>),
}

/// Spectral input describing the base manifold `N`.
#[derive(Clone, Debug, PartialEq)]
pub struct BaseSpectralData {
    d: u32,
    zero_mode_degeneracy: u32,
    spectrum: Spectrum,
    zeta: ZetaSource,
    zeta0: f64,
    zeta0_prime: f64,
    heat_coeffs: Vec<f64>,
}

const POINT_MATCH: f64 = 1e-12;

impl BaseSpectralData {
    /// The circle of radius `R` with `zeta_N(s) = 2 R^{2s} zeta_R(2s)`.
    pub fn circle(radius: f64, l_max: usize) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidConfig(format!("circle radius must be positive, got {radius}")));
        }
        let mut heat_coeffs = vec![0.0; l_max.max(1) + 1];
        heat_coeffs[0] = PI.sqrt() * radius;
        heat_coeffs[1] = -1.0;
        Ok(BaseSpectralData {
            d: 1,
            zero_mode_degeneracy: 1,
            spectrum: Spectrum::Circle { radius },
            zeta: ZetaSource::Circle { radius },
            zeta0: -1.0,
            zeta0_prime: -2.0 * (2.0 * PI * radius).ln(),
            heat_coeffs,
        })
    }

    pub fn from_parts(zeta: ZetaDataFile, spectrum: Spectrum) -> Result<Self> {
        if zeta.d == 0 {
            return Err(Error::InvalidData("base dimension d must be positive".into()));
        }
        Ok(BaseSpectralData {
            d: zeta.d,
            zero_mode_degeneracy: zeta.zero_mode_degeneracy,
            spectrum,
            zeta: ZetaSource::Table(zeta.points),
            zeta0: zeta.zeta0,
            zeta0_prime: zeta.zeta0_prime,
            heat_coeffs: zeta.heat_coeffs,
        })
    }

    /// Loads a spectrum CSV and a zeta-data JSON file.
    pub fn from_files(spectrum_path: &Path, zeta_path: &Path) -> Result<Self> {
        let spectrum = Spectrum::from_csv(&std::fs::read_to_string(spectrum_path)?)?;
        let zeta: ZetaDataFile = serde_json::from_str(&std::fs::read_to_string(zeta_path)?)?;
        Self::from_parts(zeta, spectrum)
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn zero_mode_degeneracy(&self) -> u32 {
        self.zero_mode_degeneracy
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    pub fn zeta0(&self) -> f64 {
        self.zeta0
    }

    pub fn zeta0_prime(&self) -> f64 {
        self.zeta0_prime
    }

    pub fn heat_coeffs(&self) -> &[f64] {
        &self.heat_coeffs
    }

    /// `A^N_{n/2}` of the zero-mode-free trace. Missing entries beyond the
    /// supplied list are an error.
    pub fn heat_coeff(&self, n: usize) -> Result<f64> {
        if let ZetaSource::Circle { .. } = self.zeta {
            return Ok(self.heat_coeffs.get(n).copied().unwrap_or(0.0));
        }
        self.heat_coeffs
            .get(n)
            .copied()
            .ok_or(Error::MissingBaseCoefficient { index: n })
    }

    /// True when `zeta_N` can be evaluated at any real argument.
    pub fn has_analytic_zeta(&self) -> bool {
        matches!(self.zeta, ZetaSource::Circle { .. })
    }

    /// Laurent data of `zeta_N` at real `s`.
    pub fn zeta_at(&self, s: f64) -> Result<ResFp> {
        match &self.zeta {
            ZetaSource::Circle { radius } => circle_zeta(*radius, s),
            ZetaSource::Table(points) => {
                if s == 0.0 {
                    if let Some(p) = points.iter().find(|p| p.s.abs() <= POINT_MATCH) {
                        return Ok(ResFp {
                            residue: p.residue,
                            finite_part: p.finite_part,
                        });
                    }
                    return Ok(ResFp::regular(self.zeta0));
                }
                points
                    .iter()
                    .find(|p| (p.s - s).abs() <= POINT_MATCH)
                    .map(|p| ResFp {
                        residue: p.residue,
                        finite_part: p.finite_part,
                    })
                    .ok_or_else(|| Error::MissingZetaData { needed: vec![s] })
            }
        }
    }

    /// `zeta_N'(s)` at a regular point. Tabulated bases only know `s = 0`.
    pub fn zeta_derivative(&self, s: f64) -> Result<f64> {
        match &self.zeta {
            ZetaSource::Circle { .. } if s == 0.0 => Ok(self.zeta0_prime),
            ZetaSource::Circle { radius } => {
                if s == 0.5 {
                    return Err(Error::GammaPole(s));
                }
                let r2s = 2.0 * radius.powf(2.0 * s);
                Ok(r2s * (2.0 * radius.ln() * riemann_zeta(2.0 * s)? + 2.0 * riemann_zeta_derivative(2.0 * s)?))
            }
            ZetaSource::Table(_) if s == 0.0 => Ok(self.zeta0_prime),
            ZetaSource::Table(_) => Err(Error::MissingZetaData { needed: vec![s] }),
        }
    }

    /// Fails fast with the full list of absent arguments.
    pub fn require_points(&self, needed: &[f64]) -> Result<()> {
        if let ZetaSource::Table(points) = &self.zeta {
            let missing: Vec<f64> = needed
                .iter()
                .copied()
                .filter(|&s| s != 0.0 && !points.iter().any(|p| (p.s - s).abs() <= POINT_MATCH))
                .collect();
            if !missing.is_empty() {
                return Err(Error::MissingZetaData { needed: missing });
            }
        }
        Ok(())
    }

    /// Plain value `zeta_N(s)`; errors at a pole.
    pub fn zeta_value(&self, s: f64) -> Result<f64> {
        let v = self.zeta_at(s)?;
        if v.residue != 0.0 {
            return Err(Error::GammaPole(s));
        }
        Ok(v.finite_part)
    }

    /// Argument set needed for `zeta(0)` and `zeta'(0)` at truncation order `l`.
    pub fn required_points_for_determinant(l: usize) -> Vec<f64> {
        let mut pts = vec![-0.5, 0.0];
        pts.extend((1..=l).map(|i| i as f64 / 2.0));
        pts
    }

    /// Export as the on-disk zeta file, tabulating the given arguments.
    pub fn to_zeta_file(&self, args: &[f64]) -> Result<ZetaDataFile> {
        let points = args
            .iter()
            .map(|&s| {
                self.zeta_at(s).map(|v| ZetaPoint {
                    s,
                    residue: v.residue,
                    finite_part: v.finite_part,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ZetaDataFile {
            d: self.d,
            zero_mode_degeneracy: self.zero_mode_degeneracy,
            points,
            zeta0: self.zeta0,
            zeta0_prime: self.zeta0_prime,
            heat_coeffs: self.heat_coeffs.clone(),
        })
    }
}

fn circle_zeta(radius: f64, s: f64) -> Result<ResFp> {
    if s == 0.5 {
        return Ok(ResFp {
            residue: radius,
            finite_part: 2.0 * radius * (EULER_GAMMA + radius.ln()),
        });
    }
    Ok(ResFp::regular(2.0 * radius.powf(2.0 * s) * riemann_zeta(2.0 * s)?))
}

/// `make_circle_base` of the public operation list.
pub fn make_circle_base(radius: f64, l_max: usize) -> Result<BaseSpectralData> {
    BaseSpectralData::circle(radius, l_max)
}
