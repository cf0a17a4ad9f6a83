//! Straightforward dense elimination, used as a reference by the verification suite.

use alloc::vec::Vec;

use crate::field::PrimeField;

pub fn rank(m: &[Vec<u32>], field: PrimeField) -> usize {
    let mut m: Vec<Vec<u32>> = m.to_vec();
    let ncols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..m.len()).find(|&i| m[i][c] != 0) else {
            continue;
        };
        m.swap(r, p);
        let inv = field.inv(m[r][c]);
        for j in 0..ncols {
            m[r][j] = field.mul(m[r][j], inv);
        }
        for k in r + 1..m.len() {
            let t = m[k][c];
            if t != 0 {
                for j in 0..ncols {
                    m[k][j] = field.sub(m[k][j], field.mul(t, m[r][j]));
                }
            }
        }
        r += 1;
    }
    r
}
