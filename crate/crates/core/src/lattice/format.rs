//! Reader for the `.lat` lattice description format.
//!
//! ```text
//! # explicit carrier
//! element bot
//! element top
//! leq bot top
//! fn f 1
//! bot -> top
//! top -> top
//! domain d top
//! ```
//!
//! A powerset carrier replaces `element`/`leq` with
//! `powerset <subset|superset> <item>...`; its elements are written `{a,b}`.
//! `set <alias> <element>` names an element, `lift <name> <arity>` defines a
//! set-lifted function by rows `<item>... -> <item or {items}>`, and
//! `domain <name> <element>...` declares the closure generated (Moore
//! closure) by the listed elements.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

use crate::error::ParseError;

use super::{Elem, Lattice, MonotoneFn, SetOrder, Uco};

/// A parsed `.lat` file.
#[derive(Debug, Clone)]
pub struct LatFile {
    pub lattice: Arc<Lattice>,
    pub functions: BTreeMap<String, MonotoneFn>,
    pub domains: BTreeMap<String, Uco>,
}

impl LatFile {
    pub fn function(&self, name: &str) -> Option<&MonotoneFn> {
        self.functions.get(name)
    }

    pub fn domain(&self, name: &str) -> Option<&Uco> {
        self.domains.get(name)
    }

    /// Name of a declared domain with exactly these fixpoints.
    pub fn domain_named(&self, rho: &Uco) -> Option<&str> {
        self.domains
            .iter()
            .find(|(_, d)| *d == rho)
            .map(|(n, _)| n.as_str())
    }
}

struct Line<'a> {
    number: usize,
    words: Vec<&'a str>,
}

fn tokenize(text: &str) -> Vec<Line<'_>> {
    text.lines()
        .enumerate()
        .filter_map(|(i, raw)| {
            let body = raw.split('#').next().unwrap_or("");
            let words = split_words(body);
            (!words.is_empty()).then_some(Line {
                number: i + 1,
                words,
            })
        })
        .collect()
}

/// Whitespace split that keeps `{...}` literals (which may contain spaces) whole.
fn split_words(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut start = None;
    let mut depth = 0usize;
    for (i, c) in s.char_indices() {
        match c {
            '{' => {
                depth += 1;
                start.get_or_insert(i);
            }
            '}' => depth = depth.saturating_sub(1),
            c if c.is_whitespace() && depth == 0 => {
                if let Some(st) = start.take() {
                    out.push(&s[st..i]);
                }
            }
            _ => {
                start.get_or_insert(i);
            }
        }
    }
    if let Some(st) = start {
        out.push(&s[st..]);
    }
    out
}

fn err(line: usize, message: impl Into<String>) -> ParseError {
    ParseError::new(line, message)
}

fn parse_arity(line: &Line, word: Option<&&str>) -> Result<usize, ParseError> {
    word.ok_or_else(|| err(line.number, "missing arity"))?
        .parse()
        .map_err(|_| err(line.number, "arity must be a non-negative integer"))
}

pub fn parse_lat(text: &str) -> Result<LatFile, ParseError> {
    let lines = tokenize(text);
    let mut elements = Vec::new();
    let mut pairs = Vec::new();
    let mut powerset: Option<(SetOrder, Vec<String>)> = None;
    for line in &lines {
        match line.words[0] {
            "element" => {
                let [_, id] = line.words[..] else {
                    return Err(err(line.number, "expected `element <id>`"));
                };
                elements.push(id.to_string());
            }
            "leq" => {
                let [_, a, b] = line.words[..] else {
                    return Err(err(line.number, "expected `leq <a> <b>`"));
                };
                pairs.push((a.to_string(), b.to_string()));
            }
            "powerset" => {
                if powerset.is_some() {
                    return Err(err(line.number, "only one powerset declaration is allowed"));
                }
                let order = match line.words.get(1) {
                    Some(&"subset") => SetOrder::Subset,
                    Some(&"superset") => SetOrder::Superset,
                    _ => {
                        return Err(err(
                            line.number,
                            "expected `powerset <subset|superset> <item>...`",
                        ))
                    }
                };
                powerset = Some((
                    order,
                    line.words[2..].iter().map(|s| s.to_string()).collect(),
                ));
            }
            _ => {}
        }
    }
    let mut lattice = match (powerset, elements.is_empty()) {
        (Some(_), false) => {
            return Err(err(
                0,
                "a file declares either elements or a powerset, not both",
            ))
        }
        (Some((order, items)), true) => Lattice::powerset(items, order),
        (None, false) => Lattice::explicit(elements, &pairs),
        (None, true) => return Err(err(0, "no carrier declared")),
    }
    .map_err(|e| err(0, e.to_string()))?;

    for line in lines.iter().filter(|l| l.words[0] == "set") {
        let [_, alias, value] = line.words[..] else {
            return Err(err(line.number, "expected `set <alias> <element>`"));
        };
        let e = lattice
            .parse_elem(value)
            .map_err(|e| err(line.number, e.to_string()))?;
        lattice.add_alias(e, alias);
    }
    let lattice = Arc::new(lattice);

    let mut functions = BTreeMap::new();
    let mut domains = BTreeMap::new();
    let mut i = 0;
    while i < lines.len() {
        let line = &lines[i];
        i += 1;
        match line.words[0] {
            "element" | "leq" | "powerset" | "set" => {}
            "fn" | "lift" => {
                let name = line
                    .words
                    .get(1)
                    .ok_or_else(|| err(line.number, "missing function name"))?;
                let arity = parse_arity(line, line.words.get(2))?;
                let start = i;
                while i < lines.len() && lines[i].words.contains(&"->") {
                    i += 1;
                }
                let rows = &lines[start..i];
                let f = if line.words[0] == "fn" {
                    table_fn(&lattice, name, arity, rows)?
                } else {
                    lifted_fn(&lattice, name, arity, rows, line.number)?
                };
                if functions.insert(name.to_string(), f).is_some() {
                    return Err(err(line.number, format!("function `{name}` defined twice")));
                }
            }
            "domain" => {
                let name = line
                    .words
                    .get(1)
                    .ok_or_else(|| err(line.number, "missing domain name"))?;
                let gens = line.words[2..]
                    .iter()
                    .map(|w| lattice.parse_elem(w))
                    .collect::<Result<BTreeSet<Elem>, _>>()
                    .map_err(|e| err(line.number, e.to_string()))?;
                domains.insert(name.to_string(), Uco::generated(lattice.clone(), &gens));
            }
            other => return Err(err(line.number, format!("unknown directive `{other}`"))),
        }
    }
    Ok(LatFile {
        lattice,
        functions,
        domains,
    })
}

fn split_row<'a>(row: &'a Line, arity: usize) -> Result<(&'a [&'a str], &'a str), ParseError> {
    let arrow = row
        .words
        .iter()
        .position(|w| *w == "->")
        .expect("rows contain an arrow");
    if arrow != arity || row.words.len() != arity + 2 {
        return Err(err(
            row.number,
            format!("expected {arity} inputs, `->`, and one output"),
        ));
    }
    Ok((&row.words[..arity], row.words[arity + 1]))
}

fn table_fn(
    lat: &Lattice,
    name: &str,
    arity: usize,
    rows: &[Line],
) -> Result<MonotoneFn, ParseError> {
    let mut table = HashMap::new();
    for row in rows {
        let (ins, out) = split_row(row, arity)?;
        let key = ins
            .iter()
            .map(|w| lat.parse_elem(w))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| err(row.number, e.to_string()))?;
        let value = lat
            .parse_elem(out)
            .map_err(|e| err(row.number, e.to_string()))?;
        if table.insert(key, value).is_some() {
            return Err(err(row.number, "duplicate row"));
        }
    }
    let expected = lat.size().checked_pow(arity as u32).unwrap_or(u64::MAX);
    if table.len() as u64 != expected {
        return Err(err(
            rows.first().map_or(0, |r| r.number),
            format!(
                "table of `{name}` has {} rows, expected {expected}",
                table.len()
            ),
        ));
    }
    let f = MonotoneFn::table(name, arity, table);
    lat.check_monotone(&f, super::DEFAULT_CHECK_CAP)
        .map_err(|e| err(rows.first().map_or(0, |r| r.number), e.to_string()))?;
    Ok(f)
}

fn lifted_fn(
    lat: &Lattice,
    name: &str,
    arity: usize,
    rows: &[Line],
    header: usize,
) -> Result<MonotoneFn, ParseError> {
    let p = lat
        .as_powerset()
        .ok_or_else(|| err(header, format!("`lift {name}` needs a powerset carrier")))?;
    let n = p.items().len();
    let mut images = vec![None; n.pow(arity as u32)];
    for row in rows {
        let (ins, out) = split_row(row, arity)?;
        let mut index = 0usize;
        for w in ins {
            let item = p
                .item(w)
                .ok_or_else(|| err(row.number, format!("unknown item `{w}`")))?;
            index = index * n + item;
        }
        let mask = match p.item(out) {
            Some(item) => 1u64 << item,
            None => {
                lat.parse_elem(out)
                    .map_err(|e| err(row.number, e.to_string()))?
                    .0
            }
        };
        if images[index].replace(mask).is_some() {
            return Err(err(row.number, "duplicate row"));
        }
    }
    let images: Option<Vec<u64>> = images.into_iter().collect();
    let images = images.ok_or_else(|| {
        err(
            header,
            format!("`lift {name}` does not cover every item tuple"),
        )
    })?;
    Ok(MonotoneFn::lifted(name, arity, n, images))
}

#[cfg(test)]
mod tests {
    use super::*;

    const DIAMOND: &str = "\
# a four element lattice
element bot
element a
element b
element top
leq bot a
leq bot b
leq a top
leq b top
fn up 1
bot -> a
a -> a
b -> top
top -> top
domain d a
";

    #[test]
    fn parses_explicit_lattice_with_function_and_domain() {
        let f = parse_lat(DIAMOND).unwrap();
        assert_eq!(f.lattice.size(), 4);
        let up = f.function("up").unwrap();
        let b = f.lattice.parse_elem("b").unwrap();
        assert_eq!(f.lattice.show(up.apply(&f.lattice, &[b])), "top");
        assert_eq!(f.domain("d").unwrap().fixpoints().len(), 2);
        assert_eq!(f.domain_named(f.domain("d").unwrap()), Some("d"));
    }

    #[test]
    fn rejects_partial_tables() {
        let text = DIAMOND.replace("top -> top\n", "");
        let e = parse_lat(&text).unwrap_err();
        assert!(e.to_string().contains("expected 4"), "{e}");
    }

    #[test]
    fn rejects_non_monotone_tables() {
        let text = DIAMOND
            .replace("b -> top", "b -> bot")
            .replace("a -> a", "a -> top");
        assert!(parse_lat(&text)
            .unwrap_err()
            .to_string()
            .contains("not monotone"));
    }

    #[test]
    fn parses_powerset_with_aliases_and_lifted_rows() {
        let text = "\
powerset subset 0 -1 1
set Z {0, -1, 1}
set pos {0,1}
lift neg 1
0 -> 0
-1 -> 1
1 -> -1
lift drop 1
0 -> {}
-1 -> {}
1 -> {0,1}
domain halves pos
";
        let f = parse_lat(text).unwrap();
        let lat = &f.lattice;
        let pos = lat.parse_elem("pos").unwrap();
        assert_eq!(lat.show(pos), "pos");
        let neg = f.function("neg").unwrap();
        assert_eq!(lat.show_raw(neg.apply(lat, &[pos])), "{0,-1}");
        assert_eq!(
            lat.show(f.function("drop").unwrap().apply(lat, &[pos])),
            "pos"
        );
        assert_eq!(f.domain("halves").unwrap().show(), "{pos, Z}");
    }

    #[test]
    fn reports_line_numbers() {
        let e = parse_lat("element a\nbogus x\n").unwrap_err();
        assert_eq!(e.line, 2);
    }
}
