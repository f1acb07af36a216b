use serde::Serialize;
use std::fmt::Write;

#[derive(Clone, Debug, Serialize)]
pub struct PageCell {
    pub p: i64,
    pub q: i64,
    pub dim: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Trusted {
    pub total_degree: Option<i64>,
}

/// A classical page; `r = null` is the limit page.
#[derive(Clone, Debug, Serialize)]
pub struct PageJson {
    pub r: Option<i64>,
    pub entries: Vec<PageCell>,
    pub trusted: Trusted,
}

impl PageJson {
    pub fn new(r: Option<i64>, cells: impl IntoIterator<Item = (i64, i64, usize)>, trusted: Option<i64>) -> Self {
        let mut entries: Vec<PageCell> = cells.into_iter().map(|(p, q, dim)| PageCell { p, q, dim }).collect();
        entries.sort_by_key(|c| (c.p + c.q, c.p));
        Self { r, entries, trusted: Trusted { total_degree: trusted } }
    }

    pub fn title(&self) -> String {
        match self.r {
            Some(r) => format!("E_{r}"),
            None => "E_inf".into(),
        }
    }
}

/// The page as a grid with `q` decreasing downwards and `p` increasing rightwards.
pub fn page_grid(page: &PageJson) -> String {
    let span = |f: fn(&PageCell) -> i64| {
        let it = page.entries.iter().map(f);
        (it.clone().min().unwrap_or(0).min(0), it.max().unwrap_or(0).max(0))
    };
    let (p0, p1) = span(|c| c.p);
    let (q0, q1) = span(|c| c.q);
    let cell = |p: i64, q: i64| page.entries.iter().find(|c| c.p == p && c.q == q).map(|c| c.dim.to_string());
    let label = |v: i64| v.to_string().len();
    let width = page.entries.iter().map(|c| c.dim.to_string().len()).chain([label(p0), label(p1)]).max().unwrap_or(1);
    let qw = label(q0).max(label(q1));
    let mut out = String::new();
    let _ = writeln!(out, "{}", page.title());
    for q in (q0..=q1).rev() {
        let _ = write!(out, "{q:>qw$} |");
        for p in p0..=p1 {
            let _ = write!(out, " {:>width$}", cell(p, q).unwrap_or_default());
        }
        let _ = writeln!(out);
    }
    let _ = writeln!(out, "{:>qw$} +{}", "", "-".repeat((width + 1) * (p1 - p0 + 1) as usize));
    let _ = write!(out, "{:>qw$}  ", "");
    for p in p0..=p1 {
        let _ = write!(out, " {p:>width$}");
    }
    let _ = writeln!(out);
    out.lines().map(|l| l.trim_end().to_string() + "\n").collect()
}

/// Two aligned columns.
pub fn kv_table(rows: &[(String, String)]) -> String {
    let w = rows.iter().map(|r| r.0.chars().count()).max().unwrap_or(0);
    rows.iter().map(|(k, v)| format!("{k:<w$}  {v}\n", w = w)).collect()
}

pub fn yes(b: bool) -> String {
    if b { "pass" } else { "FAIL" }.into()
}

pub fn dims(v: &[usize]) -> String {
    v.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(" ")
}
