use super::{Suggestion, SuggestionKind};
use crate::model::{name_literal, quote, Cell, Column};

/// Optimal-string-alignment distance: insertions, deletions,
/// substitutions and adjacent transpositions, over characters.
pub fn damerau_levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let (n, m) = (a.len(), b.len());
    let mut d = vec![vec![0usize; m + 1]; n + 1];
    for (i, row) in d.iter_mut().enumerate() {
        row[0] = i;
    }
    for (j, cell) in d[0].iter_mut().enumerate() {
        *cell = j;
    }
    for i in 1..=n {
        for j in 1..=m {
            let cost = usize::from(a[i - 1] != b[j - 1]);
            let mut v = (d[i - 1][j] + 1).min(d[i][j - 1] + 1).min(d[i - 1][j - 1] + cost);
            if i > 1 && j > 1 && a[i - 1] == b[j - 2] && a[i - 2] == b[j - 1] {
                v = v.min(d[i - 2][j - 2] + 1);
            }
            d[i][j] = v;
        }
    }
    d[n][m]
}

/// Largest edit distance at which a header name still counts as a near
/// miss for `bad`.
pub fn rename_threshold(bad: &str) -> usize {
    2.max(bad.chars().count().div_ceil(4))
}

fn similarity(a: &str, b: &str) -> f64 {
    let longest = a.chars().count().max(b.chars().count()).max(1);
    1.0 - damerau_levenshtein(a, b) as f64 / longest as f64
}

/// Splits `bad` at every ` and ` / ` or ` into parts and the operators
/// between them.
fn boolean_parts(bad: &str) -> (Vec<&str>, Vec<&'static str>) {
    let mut parts = Vec::new();
    let mut ops = Vec::new();
    let mut rest = bad;
    loop {
        let next = [(" and ", "and"), (" or ", "or")]
            .iter()
            .filter_map(|&(sep, op)| rest.find(sep).map(|i| (i, sep, op)))
            .min_by_key(|&(i, ..)| i);
        match next {
            Some((i, sep, op)) => {
                parts.push(&rest[..i]);
                ops.push(op);
                rest = &rest[i + sep.len()..];
            }
            None => {
                parts.push(rest);
                return (parts, ops);
            }
        }
    }
}

/// Did-you-mean suggestions for an unknown column, assuming the row is
/// bound to `r`.
pub fn suggest_columns(bad: &str, header: &[String]) -> Vec<Suggestion> {
    suggest_columns_for(bad, header, "r")
}

/// Did-you-mean suggestions for an unknown column read from the row
/// expression `receiver`.
///
/// A name that is several header names joined by `and`/`or` yields a
/// rewrite into separate lookups combined with that operator, ranked
/// first. Near misses within [`rename_threshold`] follow, best first.
pub fn suggest_columns_for(bad: &str, header: &[String], receiver: &str) -> Vec<Suggestion> {
    let mut out = Vec::new();
    let (parts, ops) = boolean_parts(bad);
    let decomposed = parts.len() >= 2 && parts.iter().all(|p| header.iter().any(|h| h == p));
    if decomposed {
        let mut text = String::new();
        for (i, p) in parts.iter().enumerate() {
            if i > 0 {
                text.push_str(&format!(" {} ", ops[i - 1]));
            }
            text.push_str(&format!("{receiver}[{}]", quote(p)));
        }
        out.push(Suggestion {
            kind: SuggestionKind::RewriteTo,
            text,
            score: 1.0,
        });
    }
    let limit = rename_threshold(bad);
    let mut renames: Vec<(usize, Suggestion)> = header
        .iter()
        .enumerate()
        .filter(|(_, h)| h.as_str() != bad)
        .filter_map(|(i, h)| {
            let part_of_rewrite = decomposed && parts.contains(&h.as_str());
            let score = similarity(bad, h);
            let near = damerau_levenshtein(bad, h) <= limit;
            ((near || part_of_rewrite) && score > 0.0).then(|| {
                (
                    i,
                    Suggestion {
                        kind: SuggestionKind::RenameTo,
                        text: h.clone(),
                        score,
                    },
                )
            })
        })
        .collect();
    renames.sort_by(|(i, a), (j, b)| b.score.total_cmp(&a.score).then(i.cmp(j)));
    out.extend(renames.into_iter().map(|(_, s)| s));
    out
}

/// Searches for a reordering of at most three columns under which every
/// cell fits its header column.
///
/// `fits(d, h)` tells whether every cell of data column `d` is acceptable
/// under header column `h`. Transpositions are tried before 3-cycles, in
/// lexicographic order; the first that works is returned.
pub fn detect_column_swap(names: &[String], fits: &dyn Fn(usize, usize) -> bool) -> Option<Suggestion> {
    let n = names.len();
    let works = |perm: &[usize]| perm.iter().enumerate().all(|(h, &d)| fits(d, h));
    let identity: Vec<usize> = (0..n).collect();
    if works(&identity) {
        return None;
    }
    for a in 0..n {
        for b in a + 1..n {
            let mut perm = identity.clone();
            perm.swap(a, b);
            if works(&perm) {
                return Some(Suggestion {
                    text: format!(
                        "swap columns {} and {}",
                        name_literal(&names[a]),
                        name_literal(&names[b])
                    ),
                    kind: SuggestionKind::ReorderColumns(perm),
                    score: 1.0,
                });
            }
        }
    }
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                for (x, y, z) in [(b, c, a), (c, a, b)] {
                    let mut perm = identity.clone();
                    perm[a] = x;
                    perm[b] = y;
                    perm[c] = z;
                    if works(&perm) {
                        let mut order = vec![String::new(); n];
                        for (h, &d) in perm.iter().enumerate() {
                            order[d] = name_literal(&names[h]);
                        }
                        return Some(Suggestion {
                            text: format!("reorder columns to {}", order.join(" | ")),
                            kind: SuggestionKind::ReorderColumns(perm),
                            score: 1.0,
                        });
                    }
                }
            }
        }
    }
    None
}

/// [`detect_column_swap`] over concrete cells.
pub fn detect_column_swap_in(columns: &[Column], rows: &[Vec<Cell>]) -> Option<Suggestion> {
    if rows.iter().any(|r| r.len() != columns.len()) {
        return None;
    }
    let names: Vec<String> = columns.iter().map(|c| c.name.to_string()).collect();
    let fits = |d: usize, h: usize| {
        rows.iter().all(|r| match &r[d] {
            Cell::Missing => columns[h].optional,
            Cell::Present(v) => v.conforms(&columns[h].sort),
        })
    };
    detect_column_swap(&names, &fits)
}
