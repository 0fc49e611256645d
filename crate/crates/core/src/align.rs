//! Minimum-cost edit alignment with unit costs and a full backtrace.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OpKind {
    Match,
    Substitute,
    Insert,
    Delete,
}

/// One alignment column. `reference` is `None` for insertions and
/// `hypothesis` is `None` for deletions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlignOp {
    pub op: OpKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reference: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hypothesis: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct AlignmentTrace {
    pub ops: Vec<AlignOp>,
    pub matches: usize,
    pub substitutions: usize,
    pub deletions: usize,
    pub insertions: usize,
    /// Reference length; always `matches + substitutions + deletions`.
    pub reference_len: usize,
}

impl AlignmentTrace {
    pub fn errors(&self) -> usize {
        self.substitutions + self.deletions + self.insertions
    }

    /// Render as three aligned rows (REF / HYP / ops), one column per op.
    pub fn render_diff(&self) -> String {
        let mut r = Vec::new();
        let mut h = Vec::new();
        let mut o = Vec::new();
        for op in &self.ops {
            let rs = op.reference.as_deref().unwrap_or("*");
            let hs = op.hypothesis.as_deref().unwrap_or("*");
            let width = rs.chars().count().max(hs.chars().count()).max(1);
            let pad = |s: &str| format!("{s}{}", " ".repeat(width - s.chars().count()));
            r.push(pad(rs));
            h.push(pad(hs));
            o.push(pad(match op.op {
                OpKind::Match => "",
                OpKind::Substitute => "S",
                OpKind::Insert => "I",
                OpKind::Delete => "D",
            }));
        }
        format!("REF: {}\nHYP: {}\nOPS: {}\n", r.join(" "), h.join(" "), o.join(" "))
    }
}

/// Edit distance only, in O(min(n, m)) memory.
pub fn edit_distance<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let (short, long) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let mut prev: Vec<usize> = (0..=short.len()).collect();
    let mut curr = vec![0; short.len() + 1];
    for (i, x) in long.iter().enumerate() {
        curr[0] = i + 1;
        for (j, y) in short.iter().enumerate() {
            let sub = prev[j] + usize::from(x != y);
            curr[j + 1] = sub.min(prev[j + 1] + 1).min(curr[j] + 1);
        }
        std::mem::swap(&mut prev, &mut curr);
    }
    prev[short.len()]
}

/// Index-level alignment: `(op, reference index, hypothesis index)`.
pub fn align_indices<T: PartialEq>(
    reference: &[T],
    hypothesis: &[T],
) -> Vec<(OpKind, Option<usize>, Option<usize>)> {
    let n = reference.len();
    let m = hypothesis.len();
    let w = m + 1;
    let mut dp = vec![0usize; (n + 1) * w];
    for j in 0..=m {
        dp[j] = j;
    }
    for i in 1..=n {
        dp[i * w] = i;
        for j in 1..=m {
            let sub = dp[(i - 1) * w + j - 1] + usize::from(reference[i - 1] != hypothesis[j - 1]);
            let del = dp[(i - 1) * w + j] + 1;
            let ins = dp[i * w + j - 1] + 1;
            dp[i * w + j] = sub.min(del).min(ins);
        }
    }

    let mut ops = Vec::with_capacity(n.max(m));
    let (mut i, mut j) = (n, m);
    while i > 0 || j > 0 {
        let here = dp[i * w + j];
        if i > 0 && j > 0 {
            let same = reference[i - 1] == hypothesis[j - 1];
            if here == dp[(i - 1) * w + j - 1] + usize::from(!same) {
                let op = if same { OpKind::Match } else { OpKind::Substitute };
                ops.push((op, Some(i - 1), Some(j - 1)));
                i -= 1;
                j -= 1;
                continue;
            }
        }
        if i > 0 && here == dp[(i - 1) * w + j] + 1 {
            ops.push((OpKind::Delete, Some(i - 1), None));
            i -= 1;
        } else {
            ops.push((OpKind::Insert, None, Some(j - 1)));
            j -= 1;
        }
    }
    ops.reverse();
    ops
}

/// Align two token sequences and count operations.
pub fn align<T: PartialEq + AsRef<str>>(reference: &[T], hypothesis: &[T]) -> AlignmentTrace {
    let mut trace = AlignmentTrace {
        reference_len: reference.len(),
        ..Default::default()
    };
    for (op, ri, hi) in align_indices(reference, hypothesis) {
        match op {
            OpKind::Match => trace.matches += 1,
            OpKind::Substitute => trace.substitutions += 1,
            OpKind::Insert => trace.insertions += 1,
            OpKind::Delete => trace.deletions += 1,
        }
        trace.ops.push(AlignOp {
            op,
            reference: ri.map(|i| reference[i].as_ref().to_string()),
            hypothesis: hi.map(|j| hypothesis[j].as_ref().to_string()),
        });
    }
    trace
}
