//! Word-level kernels on bit lines. Bit `j` of a line is word `j / 64`,
//! bit `j % 64`.

#[inline]
pub(crate) fn words_for(bits: usize) -> usize {
    bits.div_ceil(64)
}

/// Mask of the valid bits of the last word of a `bits`-wide line.
#[inline]
pub(crate) fn tail_mask(bits: usize) -> u64 {
    match bits % 64 {
        0 => u64::MAX,
        r => (1u64 << r) - 1,
    }
}

/// `dst |= src << shift`, with bits leaving `dst` dropped. Negative shifts
/// move towards bit 0. The caller clears bits past the line width.
pub(crate) fn or_shifted(dst: &mut [u64], src: &[u64], shift: i64) {
    let q = shift.div_euclid(64);
    let r = shift.rem_euclid(64) as u32;
    let n = dst.len() as i64;
    for (i, &w) in src.iter().enumerate() {
        if w == 0 {
            continue;
        }
        let j = i as i64 + q;
        if (0..n).contains(&j) {
            dst[j as usize] |= w << r;
        }
        if r > 0 && (0..n).contains(&(j + 1)) {
            dst[(j + 1) as usize] |= w >> (64 - r);
        }
    }
}

/// `dst |= rotate(src, shift)` on a cyclic line of `width` bits.
pub(crate) fn or_rotated(dst: &mut [u64], src: &[u64], shift: i64, width: usize) {
    let s = shift.rem_euclid(width as i64);
    or_shifted(dst, src, s);
    if s != 0 {
        or_shifted(dst, src, s - width as i64);
    }
    clear_tail(dst, width);
}

pub(crate) fn clear_tail(line: &mut [u64], width: usize) {
    if let Some(last) = line.last_mut() {
        *last &= tail_mask(width);
    }
    // words entirely past the width never occur: lines hold words_for(width)
}

/// Keeps only bits in `[lo, hi)`.
pub(crate) fn clip(line: &mut [u64], lo: usize, hi: usize) {
    for (i, w) in line.iter_mut().enumerate() {
        let base = i * 64;
        if base + 64 <= lo || base >= hi {
            *w = 0;
            continue;
        }
        if lo > base {
            *w &= u64::MAX << (lo - base);
        }
        if hi < base + 64 {
            *w &= tail_mask(hi - base);
        }
    }
}

#[inline]
pub(crate) fn get(line: &[u64], j: usize) -> bool {
    line[j / 64] >> (j % 64) & 1 == 1
}

#[inline]
pub(crate) fn set(line: &mut [u64], j: usize) {
    line[j / 64] |= 1 << (j % 64);
}

/// Index of the lowest and highest set bit.
pub(crate) fn span(line: &[u64]) -> Option<(usize, usize)> {
    let first = line.iter().position(|&w| w != 0)?;
    let last = line.iter().rposition(|&w| w != 0)?;
    let lo = first * 64 + line[first].trailing_zeros() as usize;
    let hi = last * 64 + 63 - line[last].leading_zeros() as usize;
    Some((lo, hi))
}

pub(crate) fn count(line: &[u64]) -> u64 {
    line.iter().map(|w| w.count_ones() as u64).sum()
}

/// Calls `f(j)` for every set bit, in increasing order.
#[inline]
pub(crate) fn for_each_one(line: &[u64], mut f: impl FnMut(usize)) {
    for (i, &w) in line.iter().enumerate() {
        let mut w = w;
        while w != 0 {
            let b = w.trailing_zeros() as usize;
            f(i * 64 + b);
            w &= w - 1;
        }
    }
}

/// Clears every set bit for which `keep(j)` is false.
#[inline]
pub(crate) fn retain(line: &mut [u64], mut keep: impl FnMut(usize) -> bool) {
    for (i, word) in line.iter_mut().enumerate() {
        let mut w = *word;
        while w != 0 {
            let b = w.trailing_zeros() as usize;
            if !keep(i * 64 + b) {
                *word &= !(1u64 << b);
            }
            w &= w - 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn to_bits(line: &[u64], width: usize) -> Vec<bool> {
        (0..width).map(|j| get(line, j)).collect()
    }

    proptest! {
        #[test]
        fn shift_matches_naive(src in proptest::collection::vec(any::<u64>(), 1..4), width in 1usize..200, shift in -300i64..300) {
            let mut src = src;
            let sw = src.len() * 64;
            let dw = width;
            let mut dst = vec![0u64; words_for(dw)];
            src.truncate(words_for(sw));
            or_shifted(&mut dst, &src, shift);
            clear_tail(&mut dst, dw);
            let got = to_bits(&dst, dw);
            let want: Vec<bool> = (0..dw).map(|j| {
                let s = j as i64 - shift;
                s >= 0 && (s as usize) < sw && get(&src, s as usize)
            }).collect();
            prop_assert_eq!(got, want);
        }

        #[test]
        fn rotate_matches_naive(bits in proptest::collection::vec(any::<bool>(), 1..150), shift in -400i64..400) {
            let width = bits.len();
            let mut src = vec![0u64; words_for(width)];
            for (j, &b) in bits.iter().enumerate() {
                if b { set(&mut src, j); }
            }
            let mut dst = vec![0u64; words_for(width)];
            or_rotated(&mut dst, &src, shift, width);
            for j in 0..width {
                let s = (j as i64 - shift).rem_euclid(width as i64) as usize;
                prop_assert_eq!(get(&dst, j), bits[s]);
            }
        }

        #[test]
        fn clip_keeps_range(src in proptest::collection::vec(any::<u64>(), 1..4), a in 0usize..256, b in 0usize..256) {
            let (lo, hi) = (a.min(b), a.max(b));
            let mut line = src.clone();
            clip(&mut line, lo, hi);
            for j in 0..src.len() * 64 {
                prop_assert_eq!(get(&line, j), get(&src, j) && (lo..hi).contains(&j));
            }
        }
    }

    #[test]
    fn span_and_iteration() {
        let mut line = vec![0u64; 3];
        assert_eq!(span(&line), None);
        for j in [5, 64, 130] {
            set(&mut line, j);
        }
        assert_eq!(span(&line), Some((5, 130)));
        let mut seen = Vec::new();
        for_each_one(&line, |j| seen.push(j));
        assert_eq!(seen, vec![5, 64, 130]);
        retain(&mut line, |j| j != 64);
        assert_eq!(count(&line), 2);
    }
}
