//! Sobol' low-discrepancy points with optional seeded digital scrambling.

use crate::error::{Error, Result};

pub const MAX_SOBOL_DIM: usize = 32;

const BITS: usize = 32;

/// Primitive polynomial data `(s, a, m_1..m_s)` for dimensions 2..=32
/// (Joe–Kuo, new-joe-kuo-6.21201).
const POLYS: [(u32, u32, &[u32]); MAX_SOBOL_DIM - 1] = [
    (1, 0, &[1]),
    (2, 1, &[1, 3]),
    (3, 1, &[1, 3, 1]),
    (3, 2, &[1, 1, 1]),
    (4, 1, &[1, 1, 3, 3]),
    (4, 4, &[1, 3, 5, 13]),
    (5, 2, &[1, 1, 5, 5, 17]),
    (5, 4, &[1, 1, 5, 5, 5]),
    (5, 7, &[1, 1, 7, 11, 19]),
    (5, 11, &[1, 1, 5, 1, 1]),
    (5, 13, &[1, 1, 1, 3, 11]),
    (5, 14, &[1, 3, 5, 5, 31]),
    (6, 1, &[1, 3, 3, 9, 7, 49]),
    (6, 13, &[1, 1, 1, 15, 21, 21]),
    (6, 16, &[1, 3, 1, 13, 27, 49]),
    (6, 19, &[1, 1, 1, 15, 7, 5]),
    (6, 22, &[1, 3, 1, 15, 13, 25]),
    (6, 25, &[1, 1, 5, 5, 19, 61]),
    (7, 1, &[1, 3, 7, 11, 23, 15, 103]),
    (7, 4, &[1, 3, 7, 13, 13, 15, 69]),
    (7, 7, &[1, 1, 3, 13, 7, 35, 63]),
    (7, 8, &[1, 3, 5, 9, 1, 25, 53]),
    (7, 14, &[1, 3, 1, 13, 9, 35, 107]),
    (7, 19, &[1, 3, 1, 5, 27, 61, 31]),
    (7, 21, &[1, 1, 5, 11, 19, 41, 61]),
    (7, 28, &[1, 3, 5, 3, 3, 13, 69]),
    (7, 31, &[1, 1, 7, 13, 1, 19, 1]),
    (7, 32, &[1, 3, 7, 5, 13, 19, 59]),
    (7, 37, &[1, 1, 3, 9, 25, 29, 41]),
    (7, 41, &[1, 3, 5, 13, 23, 1, 55]),
    (7, 42, &[1, 3, 7, 3, 13, 59, 17]),
];

fn direction_numbers(dim: usize) -> [u32; BITS] {
    let mut v = [0u32; BITS];
    if dim == 0 {
        for (i, vi) in v.iter_mut().enumerate() {
            *vi = 1 << (BITS - 1 - i);
        }
        return v;
    }
    let (s, a, m) = POLYS[dim - 1];
    let s = s as usize;
    for i in 0..s.min(BITS) {
        v[i] = m[i] << (BITS - 1 - i);
    }
    for i in s..BITS {
        v[i] = v[i - s] ^ (v[i - s] >> s);
        for k in 1..s {
            if (a >> (s - 1 - k)) & 1 == 1 {
                v[i] ^= v[i - k];
            }
        }
    }
    v
}

fn hash(n: u32) -> u32 {
    let mut h = n ^ 0x79c6_8e4a;
    h ^= h >> 16;
    h = h.wrapping_mul(0x7feb_352d);
    h ^= h >> 15;
    h = h.wrapping_mul(0x846c_a68b);
    h ^ (h >> 16)
}

/// Laine–Karras style nested scramble on bit-reversed input.
fn lk_scramble(mut n: u32, scramble: u32) -> u32 {
    let s = hash(scramble);
    n = n.wrapping_add(n << 2);
    n ^= n.wrapping_mul(0xfe9b_5742);
    n = n.wrapping_add(s);
    n.wrapping_mul((s >> 16) | 1)
}

fn owen_scramble(x: u32, key: u32) -> u32 {
    lk_scramble(x.reverse_bits(), key).reverse_bits()
}

fn dimension_key(seed: u64, dim: usize) -> u32 {
    let mut z = seed ^ (dim as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    (z ^ (z >> 31)) as u32
}

/// Raw 32-bit digits of the first `n` points, point-major.
pub fn sobol_bits(dim: usize, n: usize, seed: Option<u64>) -> Result<Vec<Vec<u32>>> {
    if dim == 0 || dim > MAX_SOBOL_DIM {
        return Err(Error::Unsupported(format!("Sobol dimension {dim} (supported 1..={MAX_SOBOL_DIM})")));
    }
    if n as u64 > 1u64 << BITS {
        return Err(Error::Unsupported(format!("{n} Sobol points")));
    }
    let dirs: Vec<[u32; BITS]> = (0..dim).map(direction_numbers).collect();
    let keys: Option<Vec<u32>> = seed.map(|s| (0..dim).map(|d| dimension_key(s, d)).collect());
    Ok((0..n as u64)
        .map(|i| {
            (0..dim)
                .map(|d| {
                    let mut x = 0u32;
                    let mut idx = i;
                    let mut bit = 0;
                    while idx != 0 {
                        if idx & 1 == 1 {
                            x ^= dirs[d][bit];
                        }
                        idx >>= 1;
                        bit += 1;
                    }
                    match &keys {
                        Some(k) => owen_scramble(x, k[d]),
                        None => x,
                    }
                })
                .collect()
        })
        .collect())
}

/// First `n` points in `[0,1)^dim`. `seed = None` gives the plain sequence.
pub fn sobol_points(dim: usize, n: usize, seed: Option<u64>) -> Result<Vec<Vec<f64>>> {
    let scale = (1u64 << BITS) as f64;
    Ok(sobol_bits(dim, n, seed)?.into_iter().map(|p| p.into_iter().map(|x| x as f64 / scale).collect()).collect())
}

/// Like [`sobol_points`] but shifted by half a digit so that every coordinate
/// lies strictly inside `(0,1)`.
pub fn sobol_points_open(dim: usize, n: usize, seed: Option<u64>) -> Result<Vec<Vec<f64>>> {
    let scale = (1u64 << BITS) as f64;
    Ok(sobol_bits(dim, n, seed)?
        .into_iter()
        .map(|p| p.into_iter().map(|x| (x as f64 + 0.5) / scale).collect())
        .collect())
}
