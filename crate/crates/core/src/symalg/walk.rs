use std::collections::HashMap;

use serde::{Deserialize, Serialize};

type State = (i64, i64, i64);

const MOVES: [State; 4] = [(1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, -1)];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WalkReport {
    pub ok: bool,
    /// States reachable from `(0,0,0)`.
    pub states: usize,
    pub shortest: usize,
    pub longest: usize,
    /// Every maximal path ends here.
    pub terminal: Vec<State>,
    pub witness: Option<String>,
}

fn allowed(s: State, mv: usize, pp: i64, qq: i64, m: i64) -> bool {
    let (i1, i2, i3) = s;
    match mv {
        0 => i1 < pp,
        1 => i2 < qq,
        2 => i3 < m,
        _ => i1 < pp && i2 < qq && i3 > -pp.min(qq),
    }
}

/// Shortest and longest maximal path length from `s`, or an error naming a
/// step that does not raise `i1 + i2 + i3`.
fn lengths(
    s: State,
    dims: (i64, i64, i64),
    memo: &mut HashMap<State, (usize, usize)>,
    terminal: &mut Vec<State>,
) -> Result<(usize, usize), String> {
    if let Some(&v) = memo.get(&s) {
        return Ok(v);
    }
    let (pp, qq, m) = dims;
    let mut best: Option<(usize, usize)> = None;
    for (k, mv) in MOVES.iter().enumerate().filter(|(k, _)| allowed(s, *k, pp, qq, m)) {
        let t = (s.0 + mv.0, s.1 + mv.1, s.2 + mv.2);
        if t.0 + t.1 + t.2 <= s.0 + s.1 + s.2 {
            return Err(format!("move {} from {s:?} does not raise the potential", k + 1));
        }
        let (lo, hi) = lengths(t, dims, memo, terminal)?;
        best = Some(match best {
            None => (lo + 1, hi + 1),
            Some((a, b)) => (a.min(lo + 1), b.max(hi + 1)),
        });
    }
    let v = best.unwrap_or_else(|| {
        terminal.push(s);
        (0, 0)
    });
    memo.insert(s, v);
    Ok(v)
}

/// Explores every walk from `(0,0,0)`. Passes when all maximal walks end at
/// `(p', q', m)` after exactly `p' + q' + m` steps.
pub fn index_walk_check(p_prime: usize, q_prime: usize, m: usize) -> WalkReport {
    let dims = (p_prime as i64, q_prime as i64, m as i64);
    let mut memo = HashMap::new();
    let mut terminal = Vec::new();
    let target = p_prime + q_prime + m;
    match lengths((0, 0, 0), dims, &mut memo, &mut terminal) {
        Err(w) => WalkReport { ok: false, states: memo.len(), shortest: 0, longest: 0, terminal, witness: Some(w) },
        Ok((shortest, longest)) => {
            terminal.sort();
            let ends_right = terminal == vec![dims];
            let ok = ends_right && shortest == target && longest == target;
            let witness = (!ok).then(|| format!("terminal states {terminal:?}, path lengths {shortest}..={longest}"));
            WalkReport { ok, states: memo.len(), shortest, longest, terminal, witness }
        }
    }
}
