//! Run-length text encoding of states, one JSON record per retained step.
//!
//! A layer is written line by line (lines separated by `$`); a line is a
//! sequence of runs `<count>b` (empty) and `<count>o` (occupied), counts of
//! one omitted and trailing empty runs dropped.

use serde::{Deserialize, Serialize};

use super::bits;
use super::state::ProcessState;

/// `{t, anchor, rows, extent}`: `anchor` is the window corner (spatial
/// coordinates, then the absolute time of row 0) and `extent` the window
/// widths; `rows[s]` encodes row `s`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Snapshot {
    pub t: i64,
    pub anchor: Vec<i64>,
    pub rows: Vec<String>,
    pub extent: Vec<i64>,
}

impl Snapshot {
    pub fn of(state: &ProcessState) -> Self {
        let w = state.window();
        let mut anchor = w.lo.clone();
        anchor.push(state.row_time(0));
        let extent = (0..w.dim()).map(|i| w.width(i) as i64).collect();
        let rows = (0..state.range()).map(|s| encode_rows(state.row_words(s), w.width(0), w.lines())).collect();
        Self { t: state.t(), anchor, rows, extent }
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("snapshot serialises")
    }

    /// Occupied sites in slab coordinates `(x, s)`, sorted.
    pub fn sites(&self) -> Vec<Vec<i64>> {
        let k = self.extent.len();
        let mut out = Vec::new();
        for (s, text) in self.rows.iter().enumerate() {
            for (line, js) in decode_rows(text).into_iter().enumerate() {
                let mut rest = Vec::with_capacity(k.saturating_sub(1));
                let mut l = line;
                for i in 1..k {
                    let w = self.extent[i] as usize;
                    rest.push(self.anchor[i] + (l % w) as i64);
                    l /= w;
                }
                for j in js {
                    let mut site = vec![self.anchor[0] + j as i64];
                    site.extend_from_slice(&rest);
                    site.push(s as i64);
                    out.push(site);
                }
            }
        }
        out.sort();
        out
    }
}

/// Encodes `lines` bit lines of `width` bits each.
pub fn encode_rows(words: &[u64], width: usize, lines: usize) -> String {
    let per = bits::words_for(width);
    let mut out = String::new();
    for line in 0..lines {
        if line > 0 {
            out.push('$');
        }
        let l = &words[line * per..][..per];
        let mut j = 0;
        let mut pending_empty = 0usize;
        while j < width {
            let v = bits::get(l, j);
            let mut run = 1;
            while j + run < width && bits::get(l, j + run) == v {
                run += 1;
            }
            if v {
                if pending_empty > 0 {
                    push_run(&mut out, pending_empty, 'b');
                    pending_empty = 0;
                }
                push_run(&mut out, run, 'o');
            } else {
                pending_empty += run;
            }
            j += run;
        }
    }
    out
}

fn push_run(out: &mut String, n: usize, c: char) {
    if n > 1 {
        out.push_str(&n.to_string());
    }
    out.push(c);
}

/// Occupied bit indices of every line.
pub fn decode_rows(text: &str) -> Vec<Vec<usize>> {
    text.split('$')
        .map(|line| {
            let mut out = Vec::new();
            let mut pos = 0usize;
            let mut num = String::new();
            for c in line.chars() {
                if c.is_ascii_digit() {
                    num.push(c);
                    continue;
                }
                let n = if num.is_empty() { 1 } else { num.parse().expect("run length") };
                num.clear();
                if c == 'o' {
                    out.extend(pos..pos + n);
                }
                pos += n;
            }
            out
        })
        .collect()
}
