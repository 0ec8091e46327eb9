//! n-out-of-n resampling shared by the FSS and inference modules.
//!
//! Each column is sorted once; a resample is a vector of multiplicities,
//! expanded in sorted order so the mean routine never sorts again.

use rand::Rng;
use rayon::prelude::*;

use crate::geometry::Angle;
use crate::mean::{mean_of_sorted, CircleSample};
use crate::rng::substream;

#[derive(Clone, Debug)]
pub(crate) struct SortedColumn {
    values: Vec<f64>,
    order: Vec<u32>,
}

impl SortedColumn {
    pub(crate) fn new(sample: &CircleSample) -> Self {
        let raw = sample.radians();
        let mut order: Vec<u32> = (0..raw.len() as u32).collect();
        order.sort_unstable_by(|&a, &b| raw[a as usize].total_cmp(&raw[b as usize]));
        let values = order.iter().map(|&i| raw[i as usize]).collect();
        SortedColumn { values, order }
    }

    pub(crate) fn len(&self) -> usize {
        self.values.len()
    }

    fn expand(&self, counts: &[u32], out: &mut Vec<f64>) {
        out.clear();
        for (v, &i) in self.values.iter().zip(&self.order) {
            for _ in 0..counts[i as usize] {
                out.push(*v);
            }
        }
    }
}

fn draw_counts<R: Rng + ?Sized>(n: usize, rng: &mut R, counts: &mut Vec<u32>) {
    counts.clear();
    counts.resize(n, 0);
    for _ in 0..n {
        counts[rng.gen_range(0..n)] += 1;
    }
}

/// B bootstrap means of a (possibly multi-column) sample; replicate `b`
/// uses stream `b` of (`master`, `tag`), so the output does not depend on
/// the number of worker threads. Rows are replicates, columns coordinates.
pub(crate) fn bootstrap_means(cols: &[SortedColumn], b: usize, master: u64, tag: u64) -> Vec<Vec<Angle>> {
    let n = cols[0].len();
    (0..b as u64)
        .into_par_iter()
        .map_init(
            || (Vec::new(), Vec::new()),
            |(counts, buf), i| {
                let mut rng = substream(master, tag, i);
                draw_counts(n, &mut rng, counts);
                cols.iter()
                    .map(|c| {
                        c.expand(counts, buf);
                        mean_of_sorted(buf, &mut rng).mean
                    })
                    .collect()
            },
        )
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expansion_is_sorted_and_sized() {
        let s = CircleSample::from_radians(&[0.3, -1.0, 2.0, 0.1]).unwrap();
        let col = SortedColumn::new(&s);
        let mut out = Vec::new();
        col.expand(&[2, 0, 1, 1], &mut out);
        assert_eq!(out, vec![0.1, 0.3, 0.3, 2.0]);
    }

    #[test]
    fn replicates_independent_of_thread_count() {
        let s = CircleSample::from_radians(&(0..40).map(|i| (i as f64 * 0.77).sin() * 3.0).collect::<Vec<_>>())
            .unwrap();
        let cols = [SortedColumn::new(&s)];
        let a = bootstrap_means(&cols, 64, 5, 1);
        let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let b = pool.install(|| bootstrap_means(&cols, 64, 5, 1));
        assert_eq!(a, b);
    }
}
