//! Sobol low-discrepancy sequence (Joe-Kuo direction numbers).

use crate::error::{Error, Result};

const BITS: usize = 32;
const SCALE: f64 = 1.0 / 4_294_967_296.0;

/// Primitive polynomial (with leading and trailing bits) and initial
/// direction numbers for each dimension. The first row is the van der
/// Corput dimension.
const DIRECTIONS: &[(u32, &[u32])] = &[
    (1, &[1]),
    (3, &[1]),
    (7, &[1, 3]),
    (11, &[1, 3, 1]),
    (13, &[1, 1, 1]),
    (19, &[1, 1, 3, 3]),
    (25, &[1, 3, 5, 13]),
    (37, &[1, 1, 5, 5, 17]),
    (41, &[1, 1, 5, 5, 5]),
    (47, &[1, 1, 7, 11, 19]),
    (55, &[1, 1, 5, 1, 1]),
    (59, &[1, 1, 1, 3, 11]),
    (61, &[1, 3, 5, 5, 31]),
    (67, &[1, 3, 3, 9, 7, 49]),
    (91, &[1, 1, 1, 15, 21, 21]),
    (97, &[1, 3, 1, 13, 27, 49]),
    (103, &[1, 1, 1, 15, 7, 5]),
    (109, &[1, 3, 1, 15, 13, 25]),
    (115, &[1, 1, 5, 5, 19, 61]),
    (131, &[1, 3, 7, 11, 23, 15, 103]),
    (137, &[1, 3, 7, 13, 13, 15, 69]),
    (143, &[1, 1, 3, 13, 7, 35, 63]),
    (145, &[1, 3, 5, 9, 1, 25, 53]),
    (157, &[1, 3, 1, 13, 9, 35, 107]),
    (167, &[1, 3, 1, 5, 27, 61, 31]),
    (171, &[1, 1, 5, 11, 19, 41, 61]),
    (185, &[1, 3, 5, 3, 3, 13, 69]),
    (191, &[1, 1, 7, 13, 1, 19, 1]),
    (193, &[1, 3, 7, 5, 13, 19, 59]),
    (203, &[1, 1, 3, 9, 25, 29, 41]),
    (211, &[1, 3, 5, 13, 23, 1, 55]),
    (213, &[1, 3, 7, 3, 13, 59, 17]),
    (229, &[1, 3, 1, 3, 5, 53, 69]),
    (239, &[1, 1, 5, 5, 23, 33, 13]),
    (241, &[1, 1, 7, 7, 1, 61, 123]),
    (247, &[1, 1, 7, 9, 13, 61, 49]),
    (253, &[1, 3, 3, 5, 3, 55, 33]),
    (285, &[1, 3, 1, 15, 31, 13, 49, 245]),
    (299, &[1, 3, 5, 15, 31, 59, 63, 97]),
    (301, &[1, 3, 1, 11, 11, 11, 77, 249]),
    (333, &[1, 3, 1, 11, 27, 43, 71, 9]),
    (351, &[1, 1, 7, 15, 21, 11, 81, 45]),
    (355, &[1, 3, 7, 3, 25, 31, 65, 79]),
    (357, &[1, 3, 1, 1, 19, 11, 3, 205]),
    (361, &[1, 1, 5, 9, 19, 21, 29, 157]),
    (369, &[1, 3, 7, 11, 1, 33, 89, 185]),
    (391, &[1, 3, 3, 3, 15, 9, 79, 71]),
    (397, &[1, 3, 7, 11, 15, 39, 119, 27]),
    (425, &[1, 1, 3, 1, 11, 31, 97, 225]),
    (451, &[1, 1, 1, 3, 23, 43, 57, 177]),
    (463, &[1, 3, 7, 7, 17, 17, 37, 71]),
    (487, &[1, 3, 1, 5, 27, 63, 123, 213]),
    (501, &[1, 1, 3, 5, 11, 43, 53, 133]),
    (529, &[1, 3, 5, 5, 29, 17, 47, 173, 479]),
    (539, &[1, 3, 3, 11, 3, 1, 109, 9, 69]),
    (545, &[1, 1, 1, 5, 17, 39, 23, 5, 343]),
    (557, &[1, 3, 1, 5, 25, 15, 31, 103, 499]),
    (563, &[1, 1, 1, 11, 11, 17, 63, 105, 183]),
    (601, &[1, 1, 5, 11, 9, 29, 97, 231, 363]),
    (607, &[1, 1, 5, 15, 19, 45, 41, 7, 383]),
    (617, &[1, 3, 7, 7, 31, 19, 83, 137, 221]),
    (623, &[1, 1, 1, 3, 23, 15, 111, 223, 83]),
    (631, &[1, 1, 5, 13, 31, 15, 55, 25, 161]),
    (637, &[1, 1, 3, 13, 25, 47, 39, 87, 257]),
];

/// Largest supported dimension.
pub const MAX_DIMENSION: usize = DIRECTIONS.len();

/// Gray-code generator of the unscrambled Sobol sequence. The all-zero
/// point at index 0 is skipped, so the first point returned is index 1.
#[derive(Debug, Clone)]
pub struct SobolSequence {
    directions: Vec<[u32; BITS]>,
    state: Vec<u32>,
    index: u64,
}

impl SobolSequence {
    pub fn new(dimension: usize) -> Result<Self> {
        if dimension == 0 || dimension > MAX_DIMENSION {
            return Err(Error::UnsupportedDimension {
                requested: dimension,
                max: MAX_DIMENSION,
            });
        }
        let directions = DIRECTIONS[..dimension]
            .iter()
            .enumerate()
            .map(|(d, &(poly, init))| direction_numbers(d, poly, init))
            .collect();
        Ok(Self {
            directions,
            state: vec![0; dimension],
            index: 0,
        })
    }

    pub fn dimension(&self) -> usize {
        self.state.len()
    }

    /// Writes the next point into `out`, which must have `dimension()` entries.
    pub fn next_into(&mut self, out: &mut [f64]) {
        let bit = self.index.trailing_ones() as usize;
        assert!(bit < BITS, "Sobol sequence exhausted");
        self.index += 1;
        for ((x, v), o) in self.state.iter_mut().zip(&self.directions).zip(out.iter_mut()) {
            *x ^= v[bit];
            *o = *x as f64 * SCALE;
        }
    }

    pub fn next_point(&mut self) -> Vec<f64> {
        let mut out = vec![0.0; self.dimension()];
        self.next_into(&mut out);
        out
    }
}

impl Iterator for SobolSequence {
    type Item = Vec<f64>;

    fn next(&mut self) -> Option<Vec<f64>> {
        Some(self.next_point())
    }
}

fn direction_numbers(dim: usize, poly: u32, init: &[u32]) -> [u32; BITS] {
    let mut v = [0u32; BITS];
    if dim == 0 {
        for (j, vj) in v.iter_mut().enumerate() {
            *vj = 1 << (BITS - 1 - j);
        }
        return v;
    }
    let degree = (31 - poly.leading_zeros()) as usize;
    for j in 0..degree.min(BITS) {
        v[j] = init[j] << (BITS - 1 - j);
    }
    for j in degree..BITS {
        let mut value = v[j - degree] ^ (v[j - degree] >> degree);
        for k in 1..degree {
            if (poly >> (degree - k)) & 1 == 1 {
                value ^= v[j - k];
            }
        }
        v[j] = value;
    }
    v
}

/// First `count` points (index 0 skipped) of the `dimension`-dimensional sequence.
pub fn sobol_sequence(dimension: usize, count: usize) -> Result<Vec<Vec<f64>>> {
    Ok(SobolSequence::new(dimension)?.take(count).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    // Unscrambled reference points, skipping the all-zero origin.
    const FIVE_DIM: [[f64; 5]; 8] = [
        [0.5, 0.5, 0.5, 0.5, 0.5],
        [0.75, 0.25, 0.25, 0.25, 0.75],
        [0.25, 0.75, 0.75, 0.75, 0.25],
        [0.375, 0.375, 0.625, 0.875, 0.375],
        [0.875, 0.875, 0.125, 0.375, 0.875],
        [0.625, 0.125, 0.875, 0.625, 0.625],
        [0.125, 0.625, 0.375, 0.125, 0.125],
        [0.1875, 0.3125, 0.9375, 0.4375, 0.5625],
    ];

    #[test]
    fn matches_reference_points() {
        let points = sobol_sequence(5, FIVE_DIM.len()).unwrap();
        for (got, want) in points.iter().zip(FIVE_DIM) {
            assert_eq!(got.as_slice(), want.as_slice());
        }
    }

    #[test]
    fn high_dimensions_match_reference() {
        let points = sobol_sequence(40, 7).unwrap();
        let want = [0.625, 0.875, 0.125, 0.625, 0.875, 0.875, 0.375, 0.125, 0.625, 0.125];
        assert_eq!(&points[6][30..40], want.as_slice());
    }

    #[test]
    fn all_dimensions_match_reference() {
        let points = sobol_sequence(MAX_DIMENSION, 1023).unwrap();
        let p777: [f64; 64] = [0.6923828125, 0.9365234375, 0.1630859375, 0.2744140625, 0.6357421875, 0.3564453125, 0.1904296875, 0.7626953125, 0.3486328125, 0.3232421875, 0.7451171875, 0.6962890625, 0.3837890625, 0.4736328125, 0.5693359375, 0.5146484375, 0.4033203125, 0.8642578125, 0.3701171875, 0.7529296875, 0.2373046875, 0.2724609375, 0.9462890625, 0.4814453125, 0.3447265625, 0.1455078125, 0.0595703125, 0.7802734375, 0.0634765625, 0.1103515625, 0.5419921875, 0.8994140625, 0.1123046875, 0.0029296875, 0.8056640625, 0.9462890625, 0.4619140625, 0.3505859375, 0.3427734375, 0.3583984375, 0.7216796875, 0.2666015625, 0.9482421875, 0.4013671875, 0.3212890625, 0.1513671875, 0.3759765625, 0.0322265625, 0.7763671875, 0.9521484375, 0.0830078125, 0.0361328125, 0.6162109375, 0.7080078125, 0.6923828125, 0.9111328125, 0.3564453125, 0.6455078125, 0.8017578125, 0.5517578125, 0.5126953125, 0.4892578125, 0.1376953125, 0.4267578125];
        let p1023: [f64; 64] = [0.0009765625, 0.7529296875, 0.6123046875, 0.1455078125, 0.1865234375, 0.4384765625, 0.1396484375, 0.6181640625, 0.3447265625, 0.8505859375, 0.6787109375, 0.0361328125, 0.1298828125, 0.6650390625, 0.3623046875, 0.4638671875, 0.3134765625, 0.8759765625, 0.5849609375, 0.3193359375, 0.8662109375, 0.0185546875, 0.7939453125, 0.1962890625, 0.2392578125, 0.3759765625, 0.5087890625, 0.7607421875, 0.8408203125, 0.4345703125, 0.9287109375, 0.6142578125, 0.4521484375, 0.8740234375, 0.3330078125, 0.8642578125, 0.9423828125, 0.9873046875, 0.9013671875, 0.6982421875, 0.6318359375, 0.9736328125, 0.9287109375, 0.1083984375, 0.4970703125, 0.3115234375, 0.9658203125, 0.7626953125, 0.8427734375, 0.8232421875, 0.2587890625, 0.1728515625, 0.6591796875, 0.4072265625, 0.9072265625, 0.1103515625, 0.7978515625, 0.8603515625, 0.7275390625, 0.3525390625, 0.1025390625, 0.1962890625, 0.7900390625, 0.0400390625];
        assert_eq!(points[776].as_slice(), p777.as_slice());
        assert_eq!(points[1022].as_slice(), p1023.as_slice());
    }

    #[test]
    fn rejects_unsupported_dimension() {
        assert!(SobolSequence::new(0).is_err());
        assert!(SobolSequence::new(MAX_DIMENSION + 1).is_err());
        assert!(SobolSequence::new(MAX_DIMENSION).is_ok());
    }

    #[test]
    fn every_dyadic_interval_gets_one_point() {
        // With the origin included, 2^m points fill every interval of width
        // 2^-m once in each coordinate. Skipping it leaves exactly one empty
        // slot, the one containing 0.
        let m = 8;
        let n = 1usize << m;
        let points = sobol_sequence(MAX_DIMENSION, n - 1).unwrap();
        for d in 0..MAX_DIMENSION {
            let mut hits = vec![0usize; n];
            for p in &points {
                hits[(p[d] * n as f64) as usize] += 1;
            }
            assert_eq!(hits[0], 0, "dimension {d}");
            assert!(hits[1..].iter().all(|&h| h == 1), "dimension {d}");
        }
    }

    #[test]
    fn iterator_and_next_into_agree() {
        let mut a = SobolSequence::new(3).unwrap();
        let mut b = SobolSequence::new(3).unwrap();
        let mut buf = [0.0; 3];
        for p in (&mut a).take(50) {
            b.next_into(&mut buf);
            assert_eq!(p.as_slice(), buf.as_slice());
        }
    }

    fn star_discrepancy_2d(points: &[[f64; 2]]) -> f64 {
        // Exact evaluation over the grid of point coordinates.
        let n = points.len() as f64;
        let mut xs: Vec<f64> = points.iter().map(|p| p[0]).chain([1.0]).collect();
        let mut ys: Vec<f64> = points.iter().map(|p| p[1]).chain([1.0]).collect();
        xs.sort_by(f64::total_cmp);
        ys.sort_by(f64::total_cmp);
        let mut worst: f64 = 0.0;
        for &x in &xs {
            for &y in &ys {
                let open = points.iter().filter(|p| p[0] < x && p[1] < y).count() as f64;
                let closed = points.iter().filter(|p| p[0] <= x && p[1] <= y).count() as f64;
                let vol = x * y;
                worst = worst.max(vol - open / n).max(closed / n - vol);
            }
        }
        worst
    }

    #[test]
    fn lower_discrepancy_than_random_points() {
        use rand::Rng;
        let n = 128;
        let sobol: Vec<[f64; 2]> = sobol_sequence(2, n).unwrap().into_iter().map(|p| [p[0], p[1]]).collect();
        let d_sobol = star_discrepancy_2d(&sobol);
        let mut rng = crate::sampler::stream_rng(5, 0);
        for _ in 0..5 {
            let random: Vec<[f64; 2]> = (0..n).map(|_| [rng.random(), rng.random()]).collect();
            assert!(d_sobol < star_discrepancy_2d(&random));
        }
    }
}
