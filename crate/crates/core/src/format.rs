//! Textual game files and condition expressions.
//!
//! ```text
//! states q0 q1
//! initial q0
//! p1 a1 a2
//! p2 b1 b2
//! alphabet 0 1 2
//! condition parity
//! state q0
//!   0,q0 0,q1
//!   1,q0 0,q0
//! ```
//! A stateless file replaces `states`/`initial` with the line `stateless` and has a single
//! `matrix` block whose cells are colors only.

use std::fmt::Write as _;
use std::sync::Arc;

use crate::color::{parse_rational, Color};
use crate::conditions::{ClosureOp, CondSpec, Condition};
use crate::error::{Error, Result};
use crate::model::{normalize_game, Game, StatelessGame};
use crate::responses::{DelayedResponse, ResponseSpace};

#[derive(Clone, Debug)]
pub enum GameFile {
    Game(Game),
    Stateless(StatelessGame),
}

impl GameFile {
    /// The file's game, with a stateless matrix embedded as a one-state game.
    pub fn game(&self) -> Result<Game> {
        match self {
            GameFile::Game(g) => Ok(g.clone()),
            GameFile::Stateless(s) => s.to_game(),
        }
    }
}

fn perr(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, column, message: message.into() }
}

struct CondParser<'a> {
    s: &'a [char],
    i: usize,
}

type PResult<T> = std::result::Result<T, (usize, String)>;

impl CondParser<'_> {
    fn ws(&mut self) {
        while self.i < self.s.len() && self.s[self.i].is_whitespace() {
            self.i += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.ws();
        self.s.get(self.i).copied()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> PResult<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err((self.i, format!("expected `{c}`")))
        }
    }

    fn ident(&mut self) -> PResult<String> {
        self.ws();
        let start = self.i;
        while self.i < self.s.len() && (self.s[self.i].is_alphanumeric() || self.s[self.i] == '_') {
            self.i += 1;
        }
        if start == self.i {
            return Err((start, "expected a name".into()));
        }
        Ok(self.s[start..self.i].iter().collect())
    }

    /// A raw token up to a depth-0 delimiter.
    fn token(&mut self) -> PResult<(usize, String)> {
        self.ws();
        let start = self.i;
        let mut depth = 0i32;
        while let Some(&c) = self.s.get(self.i) {
            match c {
                '(' | '[' => depth += 1,
                ')' | ']' if depth > 0 => depth -= 1,
                ',' | ']' | '}' | ':' | ')' if depth == 0 => break,
                c if c.is_whitespace() && depth == 0 => break,
                _ => {}
            }
            self.i += 1;
        }
        if start == self.i {
            return Err((start, "expected a value".into()));
        }
        Ok((start, self.s[start..self.i].iter().collect()))
    }

    fn color(&mut self) -> PResult<Color> {
        let (at, t) = self.token()?;
        Color::parse(&t).map_err(|m| (at, m))
    }

    fn rational(&mut self) -> PResult<num_rational::BigRational> {
        let (at, t) = self.token()?;
        parse_rational(&t).map_err(|m| (at, m))
    }

    fn number(&mut self) -> PResult<usize> {
        let (at, t) = self.token()?;
        t.parse().map_err(|_| (at, format!("expected a non-negative integer, found `{t}`")))
    }

    fn list<T>(&mut self, item: &mut impl FnMut(&mut Self) -> PResult<T>) -> PResult<Vec<T>> {
        self.expect('[')?;
        let mut out = Vec::new();
        if self.eat(']') {
            return Ok(out);
        }
        loop {
            out.push(item(self)?);
            if self.eat(']') {
                return Ok(out);
            }
            self.expect(',')?;
        }
    }

    fn word(&mut self) -> PResult<Vec<Color>> {
        if self.eat('"') {
            let mut w = Vec::new();
            while let Some(&c) = self.s.get(self.i) {
                self.i += 1;
                if c == '"' {
                    return Ok(w);
                }
                w.push(Color::parse(&c.to_string()).map_err(|m| (self.i - 1, m))?);
            }
            Err((self.i, "unterminated word".into()))
        } else {
            self.list(&mut |p| p.color())
        }
    }

    /// `{key=value,...}` with per-key value parsers.
    fn params(&mut self, keys: &[&str], mut value: impl FnMut(&mut Self, &str) -> PResult<()>) -> PResult<()> {
        if !self.eat('{') {
            return Ok(());
        }
        if self.eat('}') {
            return Ok(());
        }
        loop {
            let at = self.i;
            let k = self.ident()?;
            if !keys.contains(&k.as_str()) {
                return Err((at, format!("unknown parameter `{k}`")));
            }
            self.expect('=')?;
            value(self, &k)?;
            if self.eat('}') {
                return Ok(());
            }
            self.expect(',')?;
        }
    }

    fn args(&mut self, n: usize) -> PResult<Vec<CondSpec>> {
        self.expect('(')?;
        let mut out = Vec::new();
        for k in 0..n {
            if k > 0 {
                self.expect(',')?;
            }
            out.push(self.cond()?);
        }
        self.expect(')')?;
        Ok(out)
    }

    fn cond(&mut self) -> PResult<CondSpec> {
        self.ws();
        let at = self.i;
        let name = self.ident()?;
        let missing = |k: &str| (at, format!("`{name}` needs parameter `{k}`"));
        Ok(match name.as_str() {
            "all" => CondSpec::All,
            "parity" => CondSpec::Parity,
            "energy" => CondSpec::Energy,
            "energyparity" => CondSpec::EnergyParity,
            "meanpayoff" => {
                let mut liminf = false;
                self.params(&["liminf"], |p, _| {
                    let (at, t) = p.token()?;
                    liminf = t.parse().map_err(|_| (at, format!("expected true or false, found `{t}`")))?;
                    Ok(())
                })?;
                CondSpec::MeanPayoff { liminf }
            }
            "muller" => {
                let mut sets = None;
                self.params(&["sets"], |p, _| {
                    sets = Some(p.list(&mut |p| p.list(&mut |p| p.color()))?);
                    Ok(())
                })?;
                CondSpec::Muller { sets: sets.ok_or_else(|| missing("sets"))? }
            }
            "bounded" => {
                let (mut d, mut bound) = (None, None);
                self.params(&["d", "bound"], |p, k| {
                    if k == "d" {
                        d = Some(p.number()?);
                    } else {
                        bound = Some(p.rational()?);
                    }
                    Ok(())
                })?;
                CondSpec::Bounded { d: d.ok_or_else(|| missing("d"))?, bound }
            }
            "discounted" => {
                let (mut alpha, mut t) = (None, None);
                self.params(&["alpha", "t"], |p, k| {
                    let r = p.rational()?;
                    if k == "alpha" {
                        alpha = Some(r);
                    } else {
                        t = Some(r);
                    }
                    Ok(())
                })?;
                CondSpec::Discounted { alpha: alpha.ok_or_else(|| missing("alpha"))?, t: t.ok_or_else(|| missing("t"))? }
            }
            "avgenergy" => {
                let mut t = None;
                self.params(&["t"], |p, _| {
                    t = Some(p.rational()?);
                    Ok(())
                })?;
                CondSpec::AvgEnergy { t: t.ok_or_else(|| missing("t"))? }
            }
            "brl" => {
                let mut requests = Vec::new();
                if self.eat('{') && !self.eat('}') {
                    loop {
                        let c = self.color()?;
                        self.expect(':')?;
                        requests.push((c, self.list(&mut |p| p.word())?));
                        if self.eat('}') {
                            break;
                        }
                        self.expect(',')?;
                    }
                }
                CondSpec::Brl { requests }
            }
            "and" | "or" => {
                let mut a = self.args(2)?;
                let (y, x) = (Box::new(a.pop().expect("two")), Box::new(a.pop().expect("two")));
                if name == "and" {
                    CondSpec::And(x, y)
                } else {
                    CondSpec::Or(x, y)
                }
            }
            "closure" => {
                let (mut op, mut bound) = (None, None);
                self.params(&["op", "bound"], |p, k| {
                    if k == "op" {
                        let (at, t) = p.token()?;
                        op = Some(t.parse::<ClosureOp>().map_err(|m| (at, m))?);
                    } else {
                        bound = Some(p.number()?);
                    }
                    Ok(())
                })?;
                let inner = self.args(1)?.pop().expect("one");
                CondSpec::Closure {
                    op: op.ok_or_else(|| missing("op"))?,
                    bound: bound.ok_or_else(|| missing("bound"))?,
                    inner: Box::new(inner),
                }
            }
            _ => return Err((at, format!("unknown condition `{name}`"))),
        })
    }
}

/// Parses a condition expression such as `bounded{d=2}` or `and(parity,energy)`.
/// Errors carry a 1-based column.
pub fn parse_condition(text: &str) -> Result<CondSpec> {
    parse_condition_at(text, 1, 1)
}

fn parse_condition_at(text: &str, line: usize, col0: usize) -> Result<CondSpec> {
    let chars: Vec<char> = text.chars().collect();
    let mut p = CondParser { s: &chars, i: 0 };
    let r = p.cond().and_then(|c| match p.peek() {
        None => Ok(c),
        Some(_) => Err((p.i, "unexpected trailing input".into())),
    });
    r.map_err(|(at, m)| perr(line, col0 + at, m))
}

/// Splits on whitespace outside brackets, keeping 1-based columns.
fn tokens(line: &str) -> Vec<(usize, String)> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut start = 0;
    let mut depth = 0i32;
    for (i, c) in line.chars().enumerate() {
        if c.is_whitespace() && depth == 0 {
            if !cur.is_empty() {
                out.push((start + 1, std::mem::take(&mut cur)));
            }
            continue;
        }
        if cur.is_empty() {
            start = i;
        }
        match c {
            '(' | '[' | '{' => depth += 1,
            ')' | ']' | '}' => depth -= 1,
            _ => {}
        }
        cur.push(c);
    }
    if !cur.is_empty() {
        out.push((start + 1, cur));
    }
    out
}

fn split_cell(cell: &str) -> Option<(&str, &str)> {
    let mut depth = 0i32;
    let mut at = None;
    for (i, c) in cell.char_indices() {
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            ',' if depth == 0 => at = Some(i),
            _ => {}
        }
    }
    at.map(|i| (&cell[..i], &cell[i + 1..]))
}

struct Block {
    line: usize,
    name: Option<(usize, String)>,
    rows: Vec<(usize, Vec<(usize, String)>)>,
}

/// Parses, validates and normalizes a game file.
pub fn parse_game(text: &str) -> Result<GameFile> {
    let mut header: std::collections::HashMap<&str, (usize, Vec<(usize, String)>)> = Default::default();
    let mut condition: Option<(usize, usize, String)> = None;
    let mut stateless = None;
    let mut blocks: Vec<Block> = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let content = raw.split('#').next().unwrap_or("");
        let toks = tokens(content);
        let Some((kc, key)) = toks.first().cloned() else { continue };
        match key.as_str() {
            "states" | "initial" | "p1" | "p2" | "alphabet" => {
                if header.contains_key(key.as_str()) {
                    return Err(perr(line, kc, format!("duplicate `{key}` line")));
                }
                let k: &str = match key.as_str() {
                    "states" => "states",
                    "initial" => "initial",
                    "p1" => "p1",
                    "p2" => "p2",
                    _ => "alphabet",
                };
                header.insert(k, (line, toks[1..].to_vec()));
            }
            "condition" => {
                let off = content.find("condition").expect("keyword") + "condition".len();
                let rest = &content[off..];
                let lead = rest.len() - rest.trim_start().len();
                condition = Some((line, off + lead + 1, rest.trim().to_string()));
            }
            "stateless" => stateless = Some(line),
            "state" => {
                if toks.len() != 2 {
                    return Err(perr(line, kc, "expected `state <name>`"));
                }
                blocks.push(Block { line, name: Some(toks[1].clone()), rows: Vec::new() });
            }
            "matrix" => blocks.push(Block { line, name: None, rows: Vec::new() }),
            _ => match blocks.last_mut() {
                Some(b) => b.rows.push((line, toks)),
                None => return Err(perr(line, kc, format!("unknown directive `{key}`"))),
            },
        }
    }
    let need = |k: &str| header.get(k).cloned().ok_or_else(|| perr(1, 1, format!("missing `{k}` line")));
    let names = |k: &str| -> Result<Vec<String>> {
        let (line, toks) = need(k)?;
        if toks.is_empty() {
            return Err(perr(line, 1, format!("`{k}` needs at least one entry")));
        }
        Ok(toks.into_iter().map(|t| t.1).collect())
    };
    let p1 = names("p1")?;
    let p2 = names("p2")?;
    let (aline, atoks) = need("alphabet")?;
    let mut alphabet = Vec::new();
    for (c, t) in &atoks {
        alphabet.push(Color::parse(t).map_err(|m| perr(aline, *c, m))?);
    }
    let (cline, ccol, ctext) = condition.ok_or_else(|| perr(1, 1, "missing `condition` line"))?;
    let spec = parse_condition_at(&ctext, cline, ccol)?;
    let cond = Arc::new(Condition::build(spec, alphabet.clone()).map_err(|e| perr(cline, ccol, e.to_string()))?);
    let color_at = |line: usize, col: usize, t: &str| -> Result<usize> {
        let c = Color::parse(t).map_err(|m| perr(line, col, m))?.canonical();
        alphabet
            .iter()
            .position(|x| x.clone().canonical() == c)
            .ok_or_else(|| perr(line, col, format!("color `{t}` is not in the alphabet")))
    };
    let check_rows = |b: &Block| -> Result<()> {
        if b.rows.len() != p1.len() {
            return Err(perr(b.line, 1, format!("block has {} rows, expected one per Player 1 action ({})", b.rows.len(), p1.len())));
        }
        for (line, cells) in &b.rows {
            if cells.len() != p2.len() {
                let col = cells.last().map_or(1, |c| c.0 + c.1.len());
                return Err(perr(*line, col, format!("row has {} cells, expected {}", cells.len(), p2.len())));
            }
        }
        Ok(())
    };
    if let Some(sl) = stateless {
        if header.contains_key("states") || header.contains_key("initial") {
            return Err(perr(sl, 1, "stateless games declare no states"));
        }
        let [b] = blocks.as_slice() else {
            return Err(perr(sl, 1, "stateless game needs exactly one `matrix` block"));
        };
        if b.name.is_some() {
            return Err(perr(b.line, 1, "stateless game uses a `matrix` block"));
        }
        check_rows(b)?;
        let mut col = Vec::new();
        for (line, cells) in &b.rows {
            col.push(cells.iter().map(|(c, t)| color_at(*line, *c, t)).collect::<Result<Vec<_>>>()?);
        }
        let s = StatelessGame::new(p1, p2, cond, col)?;
        let (g, _) = normalize_game(&s.to_game()?)?;
        let (_, col) = g.tables();
        return Ok(GameFile::Stateless(StatelessGame { p1: s.p1, p2: s.p2, condition: g.condition.clone(), col: col[0].clone() }));
    }
    let states = names("states")?;
    let (iline, itoks) = need("initial")?;
    let [(ic, iname)] = itoks.as_slice() else {
        return Err(perr(iline, 1, "expected `initial <state>`"));
    };
    let initial = states.iter().position(|s| s == iname).ok_or_else(|| perr(iline, *ic, format!("unknown state `{iname}`")))?;
    let mut delta = vec![Vec::new(); states.len()];
    let mut col = vec![Vec::new(); states.len()];
    let mut seen = vec![false; states.len()];
    for b in &blocks {
        let Some((nc, name)) = &b.name else {
            return Err(perr(b.line, 1, "`matrix` blocks belong to stateless games"));
        };
        let q = states.iter().position(|s| s == name).ok_or_else(|| perr(b.line, *nc, format!("unknown state `{name}`")))?;
        if std::mem::replace(&mut seen[q], true) {
            return Err(perr(b.line, *nc, format!("state `{name}` defined twice")));
        }
        check_rows(b)?;
        for (line, cells) in &b.rows {
            let mut drow = Vec::new();
            let mut crow = Vec::new();
            for (c, t) in cells {
                let (ct, st) = split_cell(t).ok_or_else(|| perr(*line, *c, format!("cell `{t}` is not `color,successor`")))?;
                crow.push(color_at(*line, *c, ct)?);
                let scol = c + ct.chars().count() + 1;
                drow.push(states.iter().position(|s| s == st).ok_or_else(|| perr(*line, scol, format!("unknown state `{st}`")))?);
            }
            delta[q].push(drow);
            col[q].push(crow);
        }
    }
    if let Some(q) = seen.iter().position(|s| !s) {
        return Err(perr(need("states")?.0, 1, format!("state `{}` has no table", states[q])));
    }
    let g = Game::new(states, p1, p2, initial, cond, &delta, &col)?;
    Ok(GameFile::Game(normalize_game(&g)?.0))
}

pub fn read_game_file(path: &std::path::Path) -> Result<GameFile> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Validation(format!("{}: {e}", path.display())))?;
    parse_game(&text)
}

fn header(out: &mut String, p1: &[String], p2: &[String], cond: &Condition) {
    let alphabet: Vec<String> = cond.alphabet().iter().map(Color::to_string).collect();
    let _ = writeln!(out, "p1 {}", p1.join(" "));
    let _ = writeln!(out, "p2 {}", p2.join(" "));
    let _ = writeln!(out, "alphabet {}", alphabet.join(" "));
    let _ = writeln!(out, "condition {}", cond.spec());
}

pub fn write_game(g: &Game) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "states {}", g.states.join(" "));
    let _ = writeln!(out, "initial {}", g.states[g.initial]);
    header(&mut out, &g.p1, &g.p2, &g.condition);
    let a = g.alphabet();
    for q in 0..g.nq() {
        let _ = writeln!(out, "state {}", g.states[q]);
        for x in 0..g.na() {
            let cells: Vec<String> = (0..g.nb()).map(|y| format!("{},{}", a[g.col(q, x, y)], g.states[g.delta(q, x, y)])).collect();
            let _ = writeln!(out, "  {}", cells.join(" "));
        }
    }
    out
}

pub fn write_stateless(s: &StatelessGame) -> String {
    let mut out = String::from("stateless\n");
    header(&mut out, &s.p1, &s.p2, &s.condition);
    out.push_str("matrix\n");
    let a = s.condition.alphabet();
    for row in &s.col {
        let cells: Vec<String> = row.iter().map(|&c| a[c].to_string()).collect();
        let _ = writeln!(out, "  {}", cells.join(" "));
    }
    out
}

pub fn write_game_file(f: &GameFile) -> String {
    match f {
        GameFile::Game(g) => write_game(g),
        GameFile::Stateless(s) => write_stateless(s),
    }
}

/// Delayed response as one `(color,state)` pair per Player 1 action, states separated by `;`.
pub fn write_response(g: &Game, space: &ResponseSpace, t: &DelayedResponse) -> String {
    let a = g.alphabet();
    (0..g.nq())
        .map(|q| {
            let cells: String = (0..g.na())
                .map(|x| {
                    let (c, n) = space.pair(t, q, x);
                    format!("({},{})", a[c], g.states[n])
                })
                .collect();
            format!("[{cells}]")
        })
        .collect::<Vec<_>>()
        .join(";")
}

/// Splits `s` into the top-level parenthesized groups it consists of.
fn groups(s: &str) -> Option<Vec<&str>> {
    let mut out = Vec::new();
    let (mut depth, mut start) = (0usize, 0usize);
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => {
                if depth == 0 {
                    start = i + 1;
                }
                depth += 1;
            }
            ')' => {
                depth = depth.checked_sub(1)?;
                if depth == 0 {
                    out.push(&s[start..i]);
                }
            }
            c if depth == 0 && !c.is_whitespace() => return None,
            _ => {}
        }
    }
    (depth == 0).then_some(out)
}

/// Inverse of [`write_response`]; every pair must lie in its action's effect set.
pub fn parse_response(g: &Game, space: &ResponseSpace, text: &str) -> Result<DelayedResponse> {
    let bad = |m: String| Error::Validation(format!("response: {m}"));
    let parts: Vec<&str> = text.trim().split(';').map(str::trim).collect();
    if parts.len() != g.nq() {
        return Err(bad(format!("{} state blocks for {} states", parts.len(), g.nq())));
    }
    let mut choice: Vec<Vec<Option<usize>>> = space.sets.iter().map(|ss| vec![None; ss.len()]).collect();
    for (q, part) in parts.iter().enumerate() {
        let inner =
            part.strip_prefix('[').and_then(|p| p.strip_suffix(']')).ok_or_else(|| bad(format!("block `{part}` is not bracketed")))?;
        let cells = groups(inner).ok_or_else(|| bad(format!("unbalanced block `{part}`")))?;
        if cells.len() != g.na() {
            return Err(bad(format!("state {} lists {} pairs for {} actions", g.states[q], cells.len(), g.na())));
        }
        for (a, cell) in cells.iter().enumerate() {
            let (c, n) = split_cell(cell).ok_or_else(|| bad(format!("pair `({cell})` needs color,state")))?;
            let c = Color::parse(c.trim()).map_err(bad)?.canonical();
            let c = g.alphabet().iter().position(|x| *x == c).ok_or_else(|| bad(format!("color `{c}` not in the alphabet")))?;
            let n = g.states.iter().position(|x| x == n.trim()).ok_or_else(|| bad(format!("unknown state `{}`", n.trim())))?;
            let i = space.set_of[q][a];
            let k = space.sets[q][i]
                .pairs
                .iter()
                .position(|&p| p == (c, n))
                .ok_or_else(|| bad(format!("({cell}) is not an effect of {} at {}", g.p1[a], g.states[q])))?;
            match choice[q][i] {
                Some(j) if j != k => return Err(bad(format!("actions with the same effect set at {} disagree", g.states[q]))),
                _ => choice[q][i] = Some(k),
            }
        }
    }
    Ok(DelayedResponse {
        choice: choice.into_iter().map(|v| v.into_iter().map(|x| x.expect("every set has an action")).collect()).collect(),
    })
}
