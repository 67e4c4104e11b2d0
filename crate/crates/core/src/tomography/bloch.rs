use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcore::{bloch_from_density, density_from_bloch, BlochVector, KrausChannel};

/// `n` near-uniform points on the unit sphere (Fibonacci lattice), rotated
/// about `z` by a seeded angle.
pub fn fibonacci_sphere(n: usize, seed: u64) -> Vec<BlochVector> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    let offset = ChaCha8Rng::seed_from_u64(seed).random::<f64>() * std::f64::consts::TAU;
    (0..n)
        .map(|i| {
            let z = 1.0 - (2 * i + 1) as f64 / n as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let phi = offset + golden * i as f64;
            BlochVector {
                x: r * phi.cos(),
                y: r * phi.sin(),
                z,
            }
        })
        .collect()
}

/// Pure inputs on the Fibonacci lattice paired with the channel's output Bloch vectors.
pub fn bloch_deformation(
    k: &KrausChannel,
    n_samples: usize,
    seed: u64,
) -> Result<Vec<(BlochVector, BlochVector)>> {
    if k.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: k.dim(),
        });
    }
    fibonacci_sphere(n_samples, seed)
        .into_iter()
        .map(|v| {
            let out = k.apply(&density_from_bloch(&v)?)?;
            Ok((v, bloch_from_density(&out)?))
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlochRow {
    pub in_x: f64,
    pub in_y: f64,
    pub in_z: f64,
    pub out_x: f64,
    pub out_y: f64,
    pub out_z: f64,
}

impl From<&(BlochVector, BlochVector)> for BlochRow {
    fn from((a, b): &(BlochVector, BlochVector)) -> Self {
        Self {
            in_x: a.x,
            in_y: a.y,
            in_z: a.z,
            out_x: b.x,
            out_y: b.y,
            out_z: b.z,
        }
    }
}

/// CSV with header `in_x,in_y,in_z,out_x,out_y,out_z`.
pub fn write_bloch_csv<W: Write>(rows: &[(BlochVector, BlochVector)], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(BlochRow::from(row))
            .map_err(|e| Error::Tomography(e.to_string()))?;
    }
    w.flush().map_err(|e| Error::Tomography(e.to_string()))?;
    Ok(())
}

pub fn bloch_csv_string(rows: &[(BlochVector, BlochVector)]) -> Result<String> {
    let mut buf = Vec::new();
    write_bloch_csv(rows, &mut buf)?;
    String::from_utf8(buf).map_err(|e| Error::Tomography(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::{pd_kraus_single, PhaseDampingParams};

    #[test]
    fn lattice_is_on_the_sphere() {
        let pts = fibonacci_sphere(100, 3);
        assert!(pts.iter().all(|p| (p.norm() - 1.0).abs() < 1e-12));
        let mean_z: f64 = pts.iter().map(|p| p.z).sum::<f64>() / 100.0;
        assert!(mean_z.abs() < 1e-12);
        assert_eq!(fibonacci_sphere(10, 1), fibonacci_sphere(10, 1));
    }

    #[test]
    fn identity_depolarizing_and_full_pd() {
        let id = bloch_deformation(&KrausChannel::identity(2), 50, 0).unwrap();
        assert!(id.iter().all(|(a, b)| a.distance(b) < 1e-12));
        let dep = bloch_deformation(&KrausChannel::fully_depolarizing(), 50, 0).unwrap();
        assert!(dep.iter().all(|(_, b)| b.norm() < 1e-12));
        let pd = bloch_deformation(&pd_kraus_single(PhaseDampingParams::Infinite), 50, 0).unwrap();
        assert!(pd
            .iter()
            .all(|(a, b)| b.x.abs() < 1e-12 && b.y.abs() < 1e-12 && (b.z - a.z).abs() < 1e-12));
        assert!(bloch_deformation(&KrausChannel::identity(4), 5, 0).is_err());
    }

    #[test]
    fn csv_header() {
        let rows = bloch_deformation(&KrausChannel::identity(2), 2, 0).unwrap();
        let text = bloch_csv_string(&rows).unwrap();
        assert!(text.starts_with("in_x,in_y,in_z,out_x,out_y,out_z\n"));
        assert_eq!(text.lines().count(), 3);
    }
}
