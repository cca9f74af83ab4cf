//! Materialised sequence prefixes and the exact "far point" counter used by
//! every grid scan.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::seqdsl::{EvalError, Sequence};
use crate::space::{Checkpoints, NormKind};

const EVAL_CHUNK: u64 = 1 << 15;

/// `x_1, …, x_N` stored row-major (`dim` values per index).
#[derive(Debug, Clone)]
pub struct Sampled {
    dim: usize,
    values: Vec<f64>,
}

impl Sampled {
    pub fn from_sequence(seq: &dyn Sequence, horizon: u64) -> Result<Self> {
        if horizon == 0 {
            return Err(Error::invalid("horizon must be >= 1"));
        }
        let dim = seq.dim();
        let chunks: Vec<(u64, u64)> = (0..horizon.div_ceil(EVAL_CHUNK))
            .map(|c| (c * EVAL_CHUNK + 1, ((c + 1) * EVAL_CHUNK).min(horizon)))
            .collect();
        let parts: Vec<Result<Vec<f64>>> = chunks
            .par_iter()
            .map(|&(first, last)| {
                let mut out = vec![0.0; (last - first + 1) as usize * dim];
                for (k, slot) in (first..=last).zip(out.chunks_exact_mut(dim)) {
                    seq.eval_into(k, slot)?;
                }
                Ok(out)
            })
            .collect();
        let mut values = Vec::with_capacity(horizon as usize * dim);
        for part in parts {
            values.extend(part?);
        }
        Ok(Sampled { dim, values })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn horizon(&self) -> u64 {
        (self.values.len() / self.dim) as u64
    }

    /// `x_k` for 1-based `k`.
    pub fn point(&self, k: u64) -> &[f64] {
        let i = (k - 1) as usize * self.dim;
        &self.values[i..i + self.dim]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.dim)
    }
}

impl Sequence for Sampled {
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval_into(&self, k: u64, out: &mut [f64]) -> Result<(), EvalError> {
        if k == 0 || k > self.horizon() {
            return Err(EvalError {
                k,
                expr: "<sampled prefix>".into(),
                message: format!("index outside the stored prefix 1..={}", self.horizon()),
            });
        }
        out.copy_from_slice(self.point(k));
        Ok(())
    }

    fn describe(&self) -> String {
        format!("sampled prefix of length {}", self.horizon())
    }
}

/// Reference counter: one pass over the prefix, no pruning.
///
/// Returns, per threshold, the cumulative number of `k <= n_j` with
/// `‖x_k − centre‖ >= threshold`.
pub fn count_far_naive(
    sampled: &Sampled,
    cps: &Checkpoints,
    centre: &[f64],
    thresholds: &[f64],
    norm: NormKind,
) -> Vec<Vec<u64>> {
    let mut running = vec![0u64; thresholds.len()];
    let mut out = vec![Vec::with_capacity(cps.len()); thresholds.len()];
    let mut k = 1u64;
    for &n in cps.values() {
        while k <= n {
            let d = norm.dist(sampled.point(k), centre);
            for (c, &t) in running.iter_mut().zip(thresholds) {
                if d >= t {
                    *c += 1;
                }
            }
            k += 1;
        }
        for (o, &c) in out.iter_mut().zip(&running) {
            o.push(c);
        }
    }
    out
}

/// Side length of the bucketing cells.
const CELL: f64 = 1.0 / 16.0;
/// Adjacent buckets are merged while the merged group stays this small.
const MERGE_LIMIT: usize = 256;

#[derive(Debug, Clone)]
struct Group {
    lo: [f64; 2],
    hi: [f64; 2],
    start: usize,
    len: usize,
}

#[derive(Debug, Clone)]
struct Segment {
    groups: Vec<Group>,
}

/// Per-checkpoint-segment spatial buckets with tight bounding boxes.
///
/// Counting the indices far from a centre classifies whole buckets by
/// box-distance bounds and only measures points of buckets straddling the
/// threshold, using the same distance routine as [`count_far_naive`]. The
/// result is identical to the naive scan.
#[derive(Debug, Clone)]
pub struct ProximityIndex {
    dim: usize,
    cps: Checkpoints,
    coords: Vec<f64>,
    segments: Vec<Segment>,
}

impl ProximityIndex {
    pub fn build(sampled: &Sampled, cps: &Checkpoints) -> Result<Self> {
        let dim = sampled.dim();
        if dim > 2 {
            return Err(Error::UnsupportedDimension(dim));
        }
        if cps.horizon() > sampled.horizon() {
            return Err(Error::invalid(format!(
                "checkpoint horizon {} exceeds sampled horizon {}",
                cps.horizon(),
                sampled.horizon()
            )));
        }
        let mut coords = Vec::with_capacity(cps.horizon() as usize * dim);
        let mut segments = Vec::with_capacity(cps.len());
        let mut first = 1u64;
        for &last in cps.values() {
            let key = |k: u64| -> [i64; 2] {
                let p = sampled.point(k);
                let mut key = [0i64; 2];
                for (slot, v) in key.iter_mut().zip(p) {
                    *slot = (v / CELL).floor() as i64;
                }
                key
            };
            let mut order: Vec<(  [i64; 2], u64)> = (first..=last).map(|k| (key(k), k)).collect();
            order.sort_unstable();

            let mut groups: Vec<Group> = Vec::new();
            let mut i = 0;
            while i < order.len() {
                let mut j = i + 1;
                while j < order.len() && order[j].0 == order[i].0 {
                    j += 1;
                }
                let start = coords.len() / dim;
                let mut lo = [f64::INFINITY; 2];
                let mut hi = [f64::NEG_INFINITY; 2];
                for &(_, k) in &order[i..j] {
                    let p = sampled.point(k);
                    for a in 0..dim {
                        lo[a] = lo[a].min(p[a]);
                        hi[a] = hi[a].max(p[a]);
                    }
                    coords.extend_from_slice(p);
                }
                let run = Group {
                    lo,
                    hi,
                    start,
                    len: j - i,
                };
                match groups.last_mut() {
                    Some(prev) if prev.len + run.len <= MERGE_LIMIT => {
                        for a in 0..dim {
                            prev.lo[a] = prev.lo[a].min(run.lo[a]);
                            prev.hi[a] = prev.hi[a].max(run.hi[a]);
                        }
                        prev.len += run.len;
                    }
                    _ => groups.push(run),
                }
                i = j;
            }
            segments.push(Segment { groups });
            first = last + 1;
        }
        Ok(ProximityIndex {
            dim,
            cps: cps.clone(),
            coords,
            segments,
        })
    }

    pub fn checkpoints(&self) -> &Checkpoints {
        &self.cps
    }

    /// Same contract as [`count_far_naive`].
    pub fn count_far(&self, centre: &[f64], thresholds: &[f64], norm: NormKind) -> Vec<Vec<u64>> {
        let dim = self.dim;
        assert_eq!(centre.len(), dim, "centre dimension");
        let scale = 1.0 + centre.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let margins: Vec<f64> = thresholds.iter().map(|t| 1e-9 * (scale + t.abs())).collect();
        let mut running = vec![0u64; thresholds.len()];
        let mut out = vec![Vec::with_capacity(self.cps.len()); thresholds.len()];
        let mut undecided: Vec<usize> = Vec::with_capacity(thresholds.len());
        for seg in &self.segments {
            for g in &seg.groups {
                let mut near = [0.0; 2];
                let mut far = [0.0; 2];
                for a in 0..dim {
                    let below = g.lo[a] - centre[a];
                    let above = centre[a] - g.hi[a];
                    near[a] = below.max(above).max(0.0);
                    far[a] = (centre[a] - g.lo[a]).abs().max((centre[a] - g.hi[a]).abs());
                }
                let dmin = norm.of(&near[..dim]);
                let dmax = norm.of(&far[..dim]);
                undecided.clear();
                for (i, (&t, &m)) in thresholds.iter().zip(&margins).enumerate() {
                    if dmin >= t + m {
                        running[i] += g.len as u64;
                    } else if dmax < t - m {
                        // every point is strictly inside
                    } else {
                        undecided.push(i);
                    }
                }
                if undecided.is_empty() {
                    continue;
                }
                let pts = &self.coords[g.start * dim..(g.start + g.len) * dim];
                for p in pts.chunks_exact(dim) {
                    let d = norm.dist(p, centre);
                    for &i in &undecided {
                        if d >= thresholds[i] {
                            running[i] += 1;
                        }
                    }
                }
            }
            for (o, &c) in out.iter_mut().zip(&running) {
                o.push(c);
            }
        }
        out
    }
}

/// One-dimensional prefix with each checkpoint segment sorted, for
/// counting `{k <= n_j : x_k > t}` by binary search.
#[derive(Debug, Clone)]
pub struct SortedSegments {
    cps: Checkpoints,
    segments: Vec<Vec<f64>>,
    min: f64,
    max: f64,
}

impl SortedSegments {
    pub fn build(sampled: &Sampled, cps: &Checkpoints) -> Result<Self> {
        if sampled.dim() != 1 {
            return Err(Error::invalid(format!(
                "sorted segments need a 1-D sequence, got dim {}",
                sampled.dim()
            )));
        }
        let mut segments = Vec::with_capacity(cps.len());
        let mut first = 1u64;
        for &last in cps.values() {
            let mut seg: Vec<f64> = (first..=last).map(|k| sampled.point(k)[0]).collect();
            seg.sort_unstable_by(f64::total_cmp);
            segments.push(seg);
            first = last + 1;
        }
        let min = segments.iter().filter_map(|s| s.first()).fold(f64::INFINITY, |a, &b| a.min(b));
        let max = segments.iter().filter_map(|s| s.last()).fold(f64::NEG_INFINITY, |a, &b| a.max(b));
        Ok(SortedSegments {
            cps: cps.clone(),
            segments,
            min,
            max,
        })
    }

    pub fn checkpoints(&self) -> &Checkpoints {
        &self.cps
    }

    pub fn range(&self) -> (f64, f64) {
        (self.min, self.max)
    }

    /// Cumulative counts of values strictly above `t`.
    pub fn count_above(&self, t: f64) -> Vec<u64> {
        let mut running = 0u64;
        self.segments
            .iter()
            .map(|s| {
                running += (s.len() - s.partition_point(|&v| v <= t)) as u64;
                running
            })
            .collect()
    }

    /// Cumulative counts of values strictly below `t`.
    pub fn count_below(&self, t: f64) -> Vec<u64> {
        let mut running = 0u64;
        self.segments
            .iter()
            .map(|s| {
                running += s.partition_point(|&v| v < t) as u64;
                running
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seqdsl::{builtin, parse_sequence};
    use crate::space::default_checkpoints;
    use proptest::prelude::*;

    #[test]
    fn sampled_matches_pointwise_eval() {
        let spec = builtin("NOISY2D:2,-1").unwrap();
        let s = Sampled::from_sequence(&spec, 100_000).unwrap();
        assert_eq!(s.horizon(), 100_000);
        for k in [1u64, 2, 4, 99_999, 100_000] {
            assert_eq!(s.point(k), spec.eval_point(k).unwrap().coords());
        }
    }

    #[test]
    fn sampling_reports_first_error() {
        let spec = parse_sequence("1 / (n - 40000)").unwrap();
        match Sampled::from_sequence(&spec, 100_000) {
            Err(Error::Eval(e)) => assert_eq!(e.k, 40_000),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn index_agrees_with_naive_on_corpus_shapes() {
        let cps = default_checkpoints(64_000).unwrap();
        for name in ["EX_A", "IDENTITY", "DENSE_SIN", "NOISY2D:0,0", "ALT:(1,1),(-1,0.5)"] {
            let spec = builtin(name).unwrap();
            let s = Sampled::from_sequence(&spec, cps.horizon()).unwrap();
            let idx = ProximityIndex::build(&s, &cps).unwrap();
            for norm in [NormKind::L1, NormKind::L2, NormKind::Linf] {
                for c in [-1.0, -0.5, 0.0, 0.25, 1.0, 3.0] {
                    let centre = vec![c; spec.dim()];
                    let th = [0.0, 0.5, 1.0, 1.5, 2.02, 100.0];
                    assert_eq!(
                        idx.count_far(&centre, &th, norm),
                        count_far_naive(&s, &cps, &centre, &th, norm),
                        "{name} {norm} centre {c}"
                    );
                }
            }
        }
    }

    #[test]
    fn sorted_segments_count() {
        let spec = builtin("EX_A").unwrap();
        let cps = default_checkpoints(4000).unwrap();
        let s = Sampled::from_sequence(&spec, 4000).unwrap();
        let ss = SortedSegments::build(&s, &cps).unwrap();
        assert_eq!(ss.range(), (-1.0, 3969.0));
        // squares <= 1000 that are > 1: 4..=961
        assert_eq!(ss.count_above(1.0)[0], 30);
        assert_eq!(ss.count_below(0.0)[0], 500 - 16);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn index_equals_naive(
            a in -3.0f64..3.0, b in -3.0f64..3.0, freq in 0.1f64..3.0,
            cx in -4.0f64..4.0, cy in -4.0f64..4.0,
            t in prop::collection::vec(0.0f64..6.0, 1..4),
        ) {
            let text = format!("({a} * sin({freq} * n) + floor(n / 97) / 50, {b} * cos(n) / (1 + n % 7))");
            let spec = parse_sequence(&text).unwrap();
            let cps = default_checkpoints(8000).unwrap();
            let s = Sampled::from_sequence(&spec, 8000).unwrap();
            let idx = ProximityIndex::build(&s, &cps).unwrap();
            let centre = [cx, cy];
            for norm in [NormKind::L1, NormKind::L2, NormKind::Linf] {
                prop_assert_eq!(
                    idx.count_far(&centre, &t, norm),
                    count_far_naive(&s, &cps, &centre, &t, norm)
                );
            }
        }
    }
}
