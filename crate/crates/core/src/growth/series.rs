use std::io;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Cumulative ball counts `r ↦ v(r)` at strictly increasing radii.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrowthSeries {
    points: Vec<(u32, u64)>,
}

#[derive(Serialize, Deserialize)]
struct Row {
    radius: u32,
    count: u64,
}

impl GrowthSeries {
    pub fn new(points: Vec<(u32, u64)>) -> Result<GrowthSeries> {
        for w in points.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(Error::InvalidSeries(format!(
                    "radii not strictly increasing at {}",
                    w[1].0
                )));
            }
            if w[1].1 < w[0].1 {
                return Err(Error::InvalidSeries(format!(
                    "count decreases at radius {}",
                    w[1].0
                )));
            }
        }
        Ok(GrowthSeries { points })
    }

    /// Counts indexed by radius `0, 1, 2, …`.
    pub fn from_counts(counts: &[usize]) -> Result<GrowthSeries> {
        GrowthSeries::new(
            counts
                .iter()
                .enumerate()
                .map(|(r, &v)| (r as u32, v as u64))
                .collect(),
        )
    }

    /// Tabulates `f` on `radii`.
    pub fn from_fn(radii: impl IntoIterator<Item = u32>, f: impl Fn(u32) -> u64) -> Result<GrowthSeries> {
        GrowthSeries::new(radii.into_iter().map(|r| (r, f(r))).collect())
    }

    pub fn points(&self) -> &[(u32, u64)] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn min_radius(&self) -> Option<u32> {
        self.points.first().map(|p| p.0)
    }

    pub fn max_radius(&self) -> Option<u32> {
        self.points.last().map(|p| p.0)
    }

    /// Step interpolation: the value at the largest tabulated radius `≤ r`.
    pub fn value_at(&self, r: u32) -> Option<u64> {
        let idx = self.points.partition_point(|p| p.0 <= r);
        (idx > 0).then(|| self.points[idx - 1].1)
    }

    /// Every count multiplied by `k`.
    pub fn scaled(&self, k: u64) -> GrowthSeries {
        GrowthSeries {
            points: self.points.iter().map(|&(r, v)| (r, v * k)).collect(),
        }
    }

    pub fn write_csv<W: io::Write>(&self, writer: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        for &(radius, count) in &self.points {
            w.serialize(Row { radius, count })?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: io::Read>(reader: R) -> Result<GrowthSeries> {
        let mut rdr = csv::Reader::from_reader(reader);
        let points = rdr
            .deserialize::<Row>()
            .map(|row| row.map(|r| (r.radius, r.count)))
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::InvalidSeries(e.to_string()))?;
        GrowthSeries::new(points)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(GrowthSeries::new(vec![(0, 1), (0, 2)]).is_err());
        assert!(GrowthSeries::new(vec![(0, 3), (1, 2)]).is_err());
        assert!(GrowthSeries::new(vec![(0, 1), (2, 1), (5, 9)]).is_ok());
    }

    #[test]
    fn step_interpolation() {
        let s = GrowthSeries::new(vec![(2, 5), (4, 9)]).unwrap();
        assert_eq!(s.value_at(1), None);
        assert_eq!(s.value_at(2), Some(5));
        assert_eq!(s.value_at(3), Some(5));
        assert_eq!(s.value_at(40), Some(9));
    }

    #[test]
    fn csv_round_trip() {
        let s = GrowthSeries::from_counts(&[1, 3, 5, 7]).unwrap();
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "radius,count\n0,1\n1,3\n2,5\n3,7\n");
        assert_eq!(GrowthSeries::read_csv(&buf[..]).unwrap(), s);
    }
}
