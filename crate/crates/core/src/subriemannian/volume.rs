//! Monte Carlo volumes of metric balls centred at the origin.
//!
//! Euclidean balls are sampled in the cube `[−r,r]³`. Carnot–Carathéodory
//! balls are sampled in the anisotropic box `[−r,r]² × [−r², r²]`, which
//! contains them. Membership is decided by cheap bounds first and by
//! [`cc_distance`] only in the band where the bounds disagree.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::distance::{cc_distance, distance_lower_bound, distance_upper_bound, CcOptions};
use super::path::NormKind;
use crate::error::{Error, Result};
use crate::heisenberg::HeisPoint;
use crate::numeric::{fit_line, LineFit};

pub const MIN_SAMPLES: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BallMetric {
    Cc,
    Euclidean,
}

impl std::str::FromStr for BallMetric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cc" => Ok(Self::Cc),
            "euclidean" => Ok(Self::Euclidean),
            other => Err(Error::Input(format!("unknown metric {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VolumeOptions {
    pub samples: usize,
    pub seed: u64,
    /// Transcription segments for undecided CC samples.
    pub segments: usize,
}

impl Default for VolumeOptions {
    fn default() -> Self {
        Self {
            samples: 100_000,
            seed: 0,
            segments: 32,
        }
    }
}

/// How CC samples were classified.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Membership {
    pub outside_by_lower_bound: u64,
    pub inside_by_upper_bound: u64,
    pub optimized: u64,
    pub degraded: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VolumeRow {
    pub radius: f64,
    pub box_volume: f64,
    pub hits: u64,
    pub samples: u64,
    pub volume: f64,
    /// Binomial standard error of `volume`.
    pub stderr: f64,
    pub membership: Membership,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VolumeFit {
    pub metric: BallMetric,
    pub exponent: f64,
    pub fit: LineFit,
    pub rows: Vec<VolumeRow>,
}

fn cc_inside(p: &HeisPoint, r: f64, cc: &CcOptions, m: &mut Membership) -> Result<bool> {
    if distance_lower_bound(p, NormKind::L2) > r {
        m.outside_by_lower_bound += 1;
        return Ok(false);
    }
    let rho = p.x.hypot(p.y);
    let circle = rho + (4.0 * std::f64::consts::PI * p.z.abs()).sqrt();
    if circle <= r || distance_upper_bound(p, NormKind::L2) <= r {
        m.inside_by_upper_bound += 1;
        return Ok(true);
    }
    m.optimized += 1;
    let d = cc_distance(&HeisPoint::ORIGIN, p, cc)?;
    if d.degraded {
        m.degraded += 1;
    }
    Ok(d.value <= r)
}

/// Estimates ball volumes at each radius and fits `log Vol = exponent·log r + c`.
pub fn ball_volume_fit(metric: BallMetric, radii: &[f64], opts: &VolumeOptions) -> Result<VolumeFit> {
    if radii.len() < 3 {
        return Err(Error::Input(format!("need at least 3 radii, got {}", radii.len())));
    }
    if opts.samples < MIN_SAMPLES {
        return Err(Error::Input(format!(
            "need at least {MIN_SAMPLES} samples, got {}",
            opts.samples
        )));
    }
    if let Some(r) = radii.iter().find(|r| !(r.is_finite() && **r > 0.0)) {
        return Err(Error::Domain(format!("radius must be positive, got {r}")));
    }
    let cc = CcOptions {
        segments: opts.segments,
        ..CcOptions::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut rows = Vec::with_capacity(radii.len());
    for &r in radii {
        let (hz, box_volume) = match metric {
            BallMetric::Euclidean => (r, 8.0 * r * r * r),
            BallMetric::Cc => (r * r, 8.0 * r * r * r * r),
        };
        let mut membership = Membership::default();
        let mut hits = 0u64;
        for _ in 0..opts.samples {
            let p = HeisPoint::new(
                rng.gen_range(-r..=r),
                rng.gen_range(-r..=r),
                rng.gen_range(-hz..=hz),
            );
            let inside = match metric {
                BallMetric::Euclidean => p.x * p.x + p.y * p.y + p.z * p.z <= r * r,
                BallMetric::Cc => cc_inside(&p, r, &cc, &mut membership)?,
            };
            hits += inside as u64;
        }
        let n = opts.samples as f64;
        let f = hits as f64 / n;
        rows.push(VolumeRow {
            radius: r,
            box_volume,
            hits,
            samples: opts.samples as u64,
            volume: box_volume * f,
            stderr: box_volume * (f * (1.0 - f) / n).sqrt(),
            membership,
        });
    }
    if rows.iter().any(|row| row.hits == 0) {
        return Err(Error::Input("a ball received no samples; log-volume undefined".into()));
    }
    let xs: Vec<f64> = rows.iter().map(|row| row.radius.ln()).collect();
    let ys: Vec<f64> = rows.iter().map(|row| row.volume.ln()).collect();
    let fit = fit_line(&xs, &ys)?;
    Ok(VolumeFit {
        metric,
        exponent: fit.slope,
        fit,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn euclidean_matches_exact_ball() {
        let opts = VolumeOptions {
            samples: 20_000,
            seed: 3,
            ..Default::default()
        };
        let fit = ball_volume_fit(BallMetric::Euclidean, &[1.0, 2.0, 4.0], &opts).unwrap();
        assert!((fit.exponent - 3.0).abs() < 0.1, "{}", fit.exponent);
        for row in &fit.rows {
            let exact = 4.0 / 3.0 * PI * row.radius.powi(3);
            assert!((row.volume - exact).abs() < 5.0 * row.stderr, "{row:?}");
        }
    }

    #[test]
    fn preconditions() {
        let opts = VolumeOptions::default();
        assert!(matches!(
            ball_volume_fit(BallMetric::Euclidean, &[1.0, 2.0], &opts),
            Err(Error::Input(_))
        ));
        let few = VolumeOptions { samples: 10, ..opts };
        assert!(matches!(
            ball_volume_fit(BallMetric::Euclidean, &[1.0, 2.0, 3.0], &few),
            Err(Error::Input(_))
        ));
        assert!(matches!(
            ball_volume_fit(BallMetric::Euclidean, &[1.0, 1.0, 1.0], &VolumeOptions { samples: 10_000, ..opts }),
            Err(Error::Input(_))
        ));
    }

    #[test]
    fn same_seed_same_table() {
        let opts = VolumeOptions {
            samples: 10_000,
            seed: 11,
            ..Default::default()
        };
        let a = ball_volume_fit(BallMetric::Euclidean, &[1.0, 2.0, 3.0], &opts).unwrap();
        let b = ball_volume_fit(BallMetric::Euclidean, &[1.0, 2.0, 3.0], &opts).unwrap();
        assert_eq!(a, b);
    }
}
