use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::diagnostic::Diagnostic;
use super::lexer::{lex, Pos, Tok, Token};
use super::model::{ChartDecl, Command, CoverDecl, Item, Model, TransitionDecl, EULER};
use crate::coeff::{Polynomial, SmoothAtom, SmoothFn};
use crate::derivations::SuperDerivation;
use crate::grassmann::{apply_smooth, AlgebraSignature, GrassmannElement, Parity, Signature};

#[derive(Clone, Debug)]
struct Expr {
    kind: ExprKind,
    pos: Pos,
}

#[derive(Clone, Debug)]
enum ExprKind {
    Num(BigInt),
    Var(String),
    Call(String, Box<Expr>),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
}

/// A term of a derivation expression: `[-] [coeff *] d/dNAME`.
struct DTerm {
    negative: bool,
    coeff: Option<Expr>,
    generator: String,
    pos: Pos,
}

type PResult<T> = Result<T, Diagnostic>;

/// Largest number of even generators accepted in a `ring` declaration.
pub const MAX_EVEN_GENERATORS: u32 = 8;
/// Largest number of odd generators accepted in a `ring` declaration.
pub const MAX_ODD_GENERATORS: u32 = 16;
/// Largest total degree an expression may reach while it is evaluated.
pub const MAX_EXPR_DEGREE: u32 = 48;

fn degree_guard(pos: Pos, degree: u32) -> PResult<()> {
    if degree > MAX_EXPR_DEGREE {
        return Err(semantic(pos, format!("expression degree {degree} exceeds {MAX_EXPR_DEGREE}")));
    }
    Ok(())
}

fn semantic(pos: Pos, msg: impl Into<String>) -> Diagnostic {
    Diagnostic::new(pos, "semantic", msg)
}

/// Parses a document into a fully resolved [`Model`], or returns every diagnostic found.
pub fn parse_model(text: &str) -> Result<Model, Vec<Diagnostic>> {
    let toks = lex(text).map_err(|d| vec![d])?;
    let mut p = Parser {
        toks,
        i: 0,
        diags: Vec::new(),
        items: Vec::new(),
        sig: None,
        elements: BTreeMap::new(),
        derivations: BTreeSet::new(),
        has_cover: false,
    };
    p.document();
    if p.diags.is_empty() {
        let model = Model { items: std::mem::take(&mut p.items) };
        if let Some(Err(e)) = model.presentation(None) {
            let pos = p.toks.last().map(|t| t.pos).unwrap_or_default();
            return Err(vec![semantic(pos, format!("invalid presentation: {e}"))]);
        }
        Ok(model)
    } else {
        Err(p.diags)
    }
}

struct Parser {
    toks: Vec<Token>,
    i: usize,
    diags: Vec<Diagnostic>,
    items: Vec<Item>,
    sig: Option<Signature>,
    elements: BTreeMap<String, GrassmannElement>,
    derivations: BTreeSet<String>,
    has_cover: bool,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.i].tok
    }

    fn peek_at(&self, n: usize) -> &Tok {
        &self.toks[(self.i + n).min(self.toks.len() - 1)].tok
    }

    fn pos(&self) -> Pos {
        self.toks[self.i].pos
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.i].clone();
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        t
    }

    fn unexpected(&self, expected: &[&str]) -> Diagnostic {
        Diagnostic::new(self.pos(), "syntax", format!("unexpected {}", self.peek())).expecting(expected)
    }

    fn expect(&mut self, tok: Tok, label: &str) -> PResult<Pos> {
        if *self.peek() == tok {
            Ok(self.bump().pos)
        } else {
            Err(self.unexpected(&[label]))
        }
    }

    fn is_word(&self, w: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == w)
    }

    fn expect_word(&mut self, w: &str) -> PResult<Pos> {
        if self.is_word(w) {
            Ok(self.bump().pos)
        } else {
            Err(self.unexpected(&[&format!("`{w}`")]))
        }
    }

    fn ident(&mut self) -> PResult<(String, Pos)> {
        match self.peek().clone() {
            Tok::Ident(s) => Ok((s, self.bump().pos)),
            _ => Err(self.unexpected(&["identifier"])),
        }
    }

    fn int(&mut self) -> PResult<(u32, Pos)> {
        match self.peek().clone() {
            Tok::Int(s) => {
                let pos = self.bump().pos;
                s.parse::<u32>()
                    .map(|v| (v, pos))
                    .map_err(|_| Diagnostic::new(pos, "syntax", format!("integer `{s}` is too large")))
            }
            _ => Err(self.unexpected(&["integer"])),
        }
    }

    /// `NAME = int` for a fixed key.
    fn keyed_int(&mut self, key: &str) -> PResult<u32> {
        self.expect_word(key)?;
        self.expect(Tok::Eq, "`=`")?;
        Ok(self.int()?.0)
    }

    fn optional_bounds(&mut self) -> PResult<(Option<u32>, Option<u32>)> {
        let d = if self.is_word("d") { Some(self.keyed_int("d")?) } else { None };
        let big_d = if self.is_word("D") { Some(self.keyed_int("D")?) } else { None };
        Ok((d, big_d))
    }

    fn signature_decl(&mut self) -> PResult<(Signature, Pos)> {
        let pos = self.expect_word("ring")?;
        let p = self.keyed_int("p")?;
        let q = self.keyed_int("q")?;
        if p > MAX_EVEN_GENERATORS || q > MAX_ODD_GENERATORS {
            return Err(semantic(
                pos,
                format!("at most {MAX_EVEN_GENERATORS} even and {MAX_ODD_GENERATORS} odd generators are supported"),
            ));
        }
        let sig = AlgebraSignature::new(p as usize, q as usize).map_err(|e| semantic(pos, e.to_string()))?;
        Ok((sig, pos))
    }

    fn document(&mut self) {
        while *self.peek() != Tok::Eof {
            let start = self.i;
            match self.item() {
                Ok(item) => self.items.push(item),
                Err(d) => {
                    self.diags.push(d);
                    self.recover(start);
                }
            }
        }
    }

    /// Skips past the end of the failed item: the next `;` or closing `}` at depth 0.
    fn recover(&mut self, start: usize) {
        let failed_at = self.i;
        let mut depth = 0i32;
        for t in &self.toks[start..failed_at] {
            match t.tok {
                Tok::LBrace => depth += 1,
                Tok::RBrace => depth -= 1,
                _ => {}
            }
        }
        let last = failed_at.checked_sub(1).filter(|&l| l >= start).map(|l| &self.toks[l].tok);
        if depth <= 0 && matches!(last, Some(Tok::Semi | Tok::RBrace)) {
            return;
        }
        depth = 0;
        let mut j = start;
        while j < self.toks.len() {
            match self.toks[j].tok {
                Tok::Eof => break,
                Tok::LBrace => depth += 1,
                Tok::RBrace => {
                    depth -= 1;
                    if depth <= 0 && j >= failed_at {
                        j += 1;
                        if matches!(self.toks.get(j).map(|t| &t.tok), Some(Tok::Semi)) {
                            j += 1;
                        }
                        break;
                    }
                }
                Tok::Semi if depth <= 0 && j >= failed_at => {
                    j += 1;
                    break;
                }
                _ => {}
            }
            j += 1;
        }
        self.i = j.min(self.toks.len() - 1).max(failed_at.min(self.toks.len() - 1));
        if self.i == start && *self.peek() != Tok::Eof {
            self.bump();
        }
    }

    fn require_sig(&self, pos: Pos) -> PResult<Signature> {
        self.sig.clone().ok_or_else(|| semantic(pos, "no ring declared"))
    }

    fn item(&mut self) -> PResult<Item> {
        let word = match self.peek() {
            Tok::Ident(w) => w.clone(),
            _ => return Err(self.unexpected(&["declaration", "command"])),
        };
        let pos = self.pos();
        match word.as_str() {
            "ring" => {
                let (sig, pos) = self.signature_decl()?;
                self.expect(Tok::Semi, "`;`")?;
                if self.sig.is_some() {
                    return Err(semantic(pos, "ring declared twice"));
                }
                self.sig = Some(sig.clone());
                Ok(Item::Ring(sig))
            }
            "relation" => {
                self.bump();
                let sig = self.require_sig(pos)?;
                let r = self.relation_body(&sig)?;
                Ok(Item::Relation(r))
            }
            "bounds" => {
                self.bump();
                let (d, big_d) = self.optional_bounds()?;
                self.expect(Tok::Semi, "`;`")?;
                Ok(Item::Bounds { d, big_d })
            }
            "element" => {
                self.bump();
                let sig = self.require_sig(pos)?;
                let (name, npos) = self.ident()?;
                self.expect(Tok::Eq, "`=`")?;
                let e = self.expr()?;
                self.expect(Tok::Semi, "`;`")?;
                if sig.generator(&name).is_some() {
                    return Err(semantic(npos, format!("`{name}` is a generator name")));
                }
                let value = self.element(&e, &sig, true)?;
                self.elements.insert(name.clone(), value.clone());
                Ok(Item::Element { name, value })
            }
            "derivation" => {
                self.bump();
                let sig = self.require_sig(pos)?;
                let (name, npos) = self.ident()?;
                self.expect(Tok::Eq, "`=`")?;
                let terms = self.dexpr()?;
                self.expect(Tok::Semi, "`;`")?;
                if name == EULER {
                    return Err(semantic(npos, "`euler` is a built-in derivation"));
                }
                let value = self.derivation(&terms, &sig, npos)?;
                self.derivations.insert(name.clone());
                Ok(Item::Derivation { name, value })
            }
            "cover" => {
                self.bump();
                let cover = self.cover(pos)?;
                if self.has_cover {
                    return Err(semantic(pos, "cover declared twice"));
                }
                self.has_cover = true;
                Ok(Item::Cover(cover))
            }
            _ => Ok(Item::Command(self.command()?)),
        }
    }

    fn relation_body(&mut self, sig: &Signature) -> PResult<GrassmannElement> {
        let e = self.expr()?;
        self.expect(Tok::Semi, "`;`")?;
        let r = self.element(&e, sig, false)?;
        if !r.is_homogeneous() {
            return Err(semantic(e.pos, "relation not parity-homogeneous"));
        }
        if r.is_zero() {
            return Err(semantic(e.pos, "relation is zero"));
        }
        Ok(r)
    }

    fn derivation_ref(&mut self) -> PResult<String> {
        let (name, pos) = self.ident()?;
        if name != EULER && !self.derivations.contains(&name) {
            return Err(semantic(pos, format!("unknown derivation `{name}`")));
        }
        Ok(name)
    }

    fn element_arg(&mut self, pos: Pos) -> PResult<GrassmannElement> {
        let sig = self.require_sig(pos)?;
        let e = self.expr()?;
        self.element(&e, &sig, true)
    }

    fn command(&mut self) -> PResult<Command> {
        let (word, pos) = self.ident()?;
        let cmd = match word.as_str() {
            "split" => {
                self.require_sig(pos)?;
                let (d, big_d) = self.optional_bounds()?;
                Command::Split { d, big_d }
            }
            "gr" => {
                self.require_sig(pos)?;
                Command::Gr(self.int()?.0)
            }
            "euler" => {
                self.require_sig(pos)?;
                Command::Euler
            }
            "decompose" => {
                let element = self.element_arg(pos)?;
                let by = if self.is_word("by") {
                    self.bump();
                    Some(self.derivation_ref()?)
                } else {
                    None
                };
                Command::Decompose { element, by }
            }
            "apply" => {
                self.require_sig(pos)?;
                let derivation = self.derivation_ref()?;
                self.expect_word("to")?;
                let element = self.element_arg(pos)?;
                Command::Apply { derivation, element }
            }
            "smooth" => {
                let sig = self.require_sig(pos)?;
                let f = self.expr()?;
                self.expect_word("at")?;
                let mut args = Vec::new();
                loop {
                    let e = self.expr()?;
                    args.push(self.element(&e, &sig, true)?);
                    if *self.peek() == Tok::Comma {
                        self.bump();
                    } else {
                        break;
                    }
                }
                let function = function(&f, args.len())?;
                Command::Smooth { function, args }
            }
            "member" => Command::Member(self.element_arg(pos)?),
            "normal" => Command::Normal(self.element_arg(pos)?),
            "show" => Command::Show(self.element_arg(pos)?),
            "reduced" => {
                self.require_sig(pos)?;
                Command::Reduced
            }
            "adapted" => {
                self.require_sig(pos)?;
                let derivation = self.derivation_ref()?;
                let big_d = if self.is_word("D") { Some(self.keyed_int("D")?) } else { None };
                Command::Adapted { derivation, big_d }
            }
            "leibniz" => {
                self.require_sig(pos)?;
                let derivation = self.derivation_ref()?;
                let trials = if matches!(self.peek(), Tok::Int(_)) { Some(self.int()?.0) } else { None };
                Command::Leibniz { derivation, trials }
            }
            "cocycles" | "batchelor" => {
                if !self.has_cover {
                    return Err(semantic(pos, "no cover declared"));
                }
                if word == "cocycles" {
                    Command::Cocycles
                } else {
                    Command::Batchelor
                }
            }
            _ => {
                return Err(Diagnostic::new(pos, "syntax", format!("unknown command `{word}`")).expecting(&[
                    "ring", "relation", "bounds", "element", "derivation", "cover", "split", "gr", "euler",
                    "decompose", "apply", "smooth", "member", "normal", "reduced", "adapted", "leibniz",
                    "cocycles", "batchelor", "show",
                ]))
            }
        };
        self.expect(Tok::Semi, "`;`")?;
        Ok(cmd)
    }

    fn cover(&mut self, pos: Pos) -> PResult<CoverDecl> {
        self.expect(Tok::LBrace, "`{`")?;
        let mut decl = CoverDecl::default();
        let mut seen = BTreeSet::new();
        loop {
            match self.peek().clone() {
                Tok::RBrace => {
                    self.bump();
                    break;
                }
                Tok::Ident(w) if w == "chart" => {
                    self.bump();
                    let (name, npos) = self.ident()?;
                    self.expect(Tok::Colon, "`:`")?;
                    let (sig, _) = self.signature_decl()?;
                    let mut chart = ChartDecl { name: name.clone(), sig, relations: Vec::new(), d: None, big_d: None };
                    if *self.peek() == Tok::LBrace {
                        self.bump();
                        while *self.peek() != Tok::RBrace {
                            if self.is_word("relation") {
                                self.bump();
                                let sig = chart.sig.clone();
                                chart.relations.push(self.relation_body(&sig)?);
                            } else if self.is_word("bounds") {
                                self.bump();
                                (chart.d, chart.big_d) = self.optional_bounds()?;
                                self.expect(Tok::Semi, "`;`")?;
                            } else {
                                return Err(self.unexpected(&["`relation`", "`bounds`", "`}`"]));
                            }
                        }
                        self.bump();
                    }
                    self.expect(Tok::Semi, "`;`")?;
                    if !seen.insert(name.clone()) {
                        return Err(semantic(npos, format!("chart `{name}` declared twice")));
                    }
                    decl.charts.push(chart);
                }
                Tok::Ident(w) if w == "overlap" => {
                    self.bump();
                    let mut names = Vec::new();
                    while let Tok::Ident(_) = self.peek() {
                        let (n, npos) = self.ident()?;
                        if !seen.contains(&n) {
                            return Err(semantic(npos, format!("unknown chart `{n}`")));
                        }
                        names.push(n);
                    }
                    if names.len() < 2 {
                        return Err(self.unexpected(&["chart name"]));
                    }
                    self.expect(Tok::Semi, "`;`")?;
                    decl.overlaps.push(names);
                }
                Tok::Ident(w) if w == "transition" => {
                    self.bump();
                    let t = self.transition(&decl)?;
                    decl.transitions.push(t);
                }
                Tok::Ident(w) if w == "weights" => {
                    self.bump();
                    let mut ws = Vec::new();
                    while let Tok::Ident(_) = self.peek() {
                        let (n, npos) = self.ident()?;
                        if !seen.contains(&n) {
                            return Err(semantic(npos, format!("unknown chart `{n}`")));
                        }
                        self.expect(Tok::Eq, "`=`")?;
                        ws.push((n, self.rational()?));
                    }
                    self.expect(Tok::Semi, "`;`")?;
                    decl.weights = Some(ws);
                }
                _ => return Err(self.unexpected(&["`chart`", "`overlap`", "`transition`", "`weights`", "`}`"])),
            }
        }
        if *self.peek() == Tok::Semi {
            self.bump();
        }
        if decl.charts.is_empty() {
            return Err(semantic(pos, "cover has no charts"));
        }
        decl.gluing(None).map_err(|e| semantic(pos, format!("invalid cover: {e}")))?;
        Ok(decl)
    }

    fn transition(&mut self, decl: &CoverDecl) -> PResult<TransitionDecl> {
        let (from, fpos) = self.ident()?;
        self.expect(Tok::Arrow, "`->`")?;
        let (to, tpos) = self.ident()?;
        let a = decl.chart_index(&from).ok_or_else(|| semantic(fpos, format!("unknown chart `{from}`")))?;
        let b = decl.chart_index(&to).ok_or_else(|| semantic(tpos, format!("unknown chart `{to}`")))?;
        let (src, dst) = (decl.charts[a].sig.clone(), decl.charts[b].sig.clone());
        self.expect(Tok::LBrace, "`{`")?;
        let mut given: BTreeMap<String, GrassmannElement> = BTreeMap::new();
        while *self.peek() != Tok::RBrace {
            let (g, gpos) = self.ident()?;
            if src.generator(&g).is_none() {
                return Err(semantic(gpos, format!("`{g}` is not a generator of chart `{from}`")));
            }
            self.expect(Tok::Arrow, "`->`")?;
            let e = self.expr()?;
            let image = self.element(&e, &dst, false)?;
            if given.insert(g.clone(), image).is_some() {
                return Err(semantic(gpos, format!("image of `{g}` given twice")));
            }
            match self.peek() {
                Tok::Semi => {
                    self.bump();
                }
                Tok::RBrace => {}
                _ => return Err(self.unexpected(&["`;`", "`}`"])),
            }
        }
        self.bump();
        self.expect(Tok::Semi, "`;`")?;
        let mut images = Vec::new();
        let names = src.even_names().iter().map(|n| (n, true)).chain(src.odd_names().iter().map(|n| (n, false)));
        for (k, (name, even)) in names.enumerate() {
            let image = match given.remove(name) {
                Some(img) => img,
                None => {
                    let j = if even { k } else { k - src.p() };
                    let default = if even {
                        (j < dst.p()).then(|| GrassmannElement::even_generator(&dst, j))
                    } else {
                        (j < dst.q()).then(|| GrassmannElement::odd_generator(&dst, j))
                    };
                    default.ok_or_else(|| semantic(tpos, format!("no image for `{name}`")))?
                }
            };
            images.push((name.clone(), image));
        }
        Ok(TransitionDecl { from, to, images })
    }

    fn rational(&mut self) -> PResult<BigRational> {
        let neg = if *self.peek() == Tok::Minus {
            self.bump();
            true
        } else {
            false
        };
        let num = self.bigint()?;
        let r = if *self.peek() == Tok::Slash {
            let pos = self.bump().pos;
            let den = self.bigint()?;
            if den.is_zero() {
                return Err(semantic(pos, "division by zero"));
            }
            BigRational::new(num, den)
        } else {
            BigRational::from_integer(num)
        };
        Ok(if neg { -r } else { r })
    }

    fn bigint(&mut self) -> PResult<BigInt> {
        match self.peek().clone() {
            Tok::Int(s) => {
                self.bump();
                Ok(s.parse().expect("lexer only emits digits"))
            }
            _ => Err(self.unexpected(&["integer"])),
        }
    }

    // expr := term (('+'|'-') term)*
    fn expr(&mut self) -> PResult<Expr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    let rhs = self.term()?;
                    lhs = Expr { pos: lhs.pos, kind: ExprKind::Add(Box::new(lhs), Box::new(rhs)) };
                }
                Tok::Minus => {
                    self.bump();
                    let rhs = self.term()?;
                    lhs = Expr { pos: lhs.pos, kind: ExprKind::Sub(Box::new(lhs), Box::new(rhs)) };
                }
                _ => return Ok(lhs),
            }
        }
    }

    // term := unary (('*'|'/') unary)*
    fn term(&mut self) -> PResult<Expr> {
        let mut lhs = self.unary()?;
        loop {
            let pos = self.pos();
            match self.peek() {
                Tok::Star if !matches!(self.peek_at(1), Tok::Deriv(_)) => {
                    self.bump();
                    let rhs = self.unary()?;
                    lhs = Expr { pos: lhs.pos, kind: ExprKind::Mul(Box::new(lhs), Box::new(rhs)) };
                }
                Tok::Slash => {
                    self.bump();
                    let rhs = self.unary()?;
                    lhs = Expr { kind: ExprKind::Div(Box::new(lhs), Box::new(rhs)), pos };
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> PResult<Expr> {
        if *self.peek() == Tok::Minus {
            let pos = self.bump().pos;
            let inner = self.unary()?;
            return Ok(Expr { kind: ExprKind::Neg(Box::new(inner)), pos });
        }
        let base = self.atom()?;
        if *self.peek() == Tok::Caret {
            self.bump();
            let (n, _) = self.int()?;
            return Ok(Expr { pos: base.pos, kind: ExprKind::Pow(Box::new(base), n) });
        }
        Ok(base)
    }

    fn atom(&mut self) -> PResult<Expr> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Int(s) => {
                self.bump();
                Ok(Expr { kind: ExprKind::Num(s.parse().expect("lexer only emits digits")), pos })
            }
            Tok::Ident(name) => {
                self.bump();
                if *self.peek() == Tok::LParen {
                    self.bump();
                    let arg = self.expr()?;
                    self.expect(Tok::RParen, "`)`")?;
                    Ok(Expr { kind: ExprKind::Call(name, Box::new(arg)), pos })
                } else {
                    Ok(Expr { kind: ExprKind::Var(name), pos })
                }
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            _ => Err(self.unexpected(&["number", "identifier", "`(`", "`-`"])),
        }
    }

    // dexpr := '0' | dterm (('+'|'-') dterm)*
    fn dexpr(&mut self) -> PResult<Vec<DTerm>> {
        if matches!(self.peek(), Tok::Int(s) if s == "0") && *self.peek_at(1) == Tok::Semi {
            self.bump();
            return Ok(Vec::new());
        }
        let mut terms = vec![self.dterm(false)?];
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    terms.push(self.dterm(false)?);
                }
                Tok::Minus => {
                    self.bump();
                    terms.push(self.dterm(true)?);
                }
                _ => return Ok(terms),
            }
        }
    }

    fn dterm(&mut self, mut negative: bool) -> PResult<DTerm> {
        let pos = self.pos();
        while *self.peek() == Tok::Minus && !matches!(self.peek_at(1), Tok::Int(_) | Tok::Ident(_) | Tok::LParen) {
            self.bump();
            negative = !negative;
        }
        let coeff = if matches!(self.peek(), Tok::Deriv(_)) {
            None
        } else {
            let c = self.term()?;
            self.expect(Tok::Star, "`*`")?;
            Some(c)
        };
        match self.peek().clone() {
            Tok::Deriv(g) => {
                self.bump();
                Ok(DTerm { negative, coeff, generator: g, pos })
            }
            _ => Err(self.unexpected(&["`d/d<generator>`"])),
        }
    }

    fn derivation(&self, terms: &[DTerm], sig: &Signature, pos: Pos) -> PResult<SuperDerivation> {
        if terms.is_empty() {
            return Ok(SuperDerivation::zero(sig, Parity::Even));
        }
        let mut even = vec![GrassmannElement::zero(sig); sig.p()];
        let mut odd = vec![GrassmannElement::zero(sig); sig.q()];
        for t in terms {
            let mut c = match &t.coeff {
                Some(e) => self.element(e, sig, true)?,
                None => GrassmannElement::one(sig),
            };
            if t.negative {
                c = -&c;
            }
            match sig.generator(&t.generator) {
                Some(Ok(i)) => even[i] += &c,
                Some(Err(j)) => odd[j] += &c,
                None => return Err(semantic(t.pos, format!("unknown generator `{}`", t.generator))),
            }
        }
        if even.iter().chain(&odd).all(GrassmannElement::is_zero) {
            return Ok(SuperDerivation::zero(sig, Parity::Even));
        }
        SuperDerivation::new(sig, even, odd).map_err(|e| semantic(pos, e.to_string()))
    }

    /// Evaluates an expression in the algebra; named elements are visible when `names` is set.
    fn element(&self, e: &Expr, sig: &Signature, names: bool) -> PResult<GrassmannElement> {
        let rec = |x: &Expr| self.element(x, sig, names);
        Ok(match &e.kind {
            ExprKind::Num(n) => GrassmannElement::constant(sig, BigRational::from_integer(n.clone())),
            ExprKind::Var(v) => match sig.generator(v) {
                Some(Ok(i)) => GrassmannElement::even_generator(sig, i),
                Some(Err(j)) => GrassmannElement::odd_generator(sig, j),
                None => match self.elements.get(v) {
                    Some(x) if names => x.clone(),
                    _ => return Err(semantic(e.pos, format!("unknown identifier `{v}`"))),
                },
            },
            ExprKind::Call(f, arg) => {
                let atom = SmoothAtom::from_name(f)
                    .ok_or_else(|| semantic(e.pos, format!("unknown function `{f}`")))?;
                let a = rec(arg)?;
                apply_smooth(&SmoothFn::Atom(atom), &[a]).map_err(|err| semantic(e.pos, err.to_string()))?
            }
            ExprKind::Neg(x) => -&rec(x)?,
            ExprKind::Add(a, b) => &rec(a)? + &rec(b)?,
            ExprKind::Sub(a, b) => &rec(a)? - &rec(b)?,
            ExprKind::Mul(a, b) => {
                let (a, b) = (rec(a)?, rec(b)?);
                degree_guard(e.pos, a.total_degree().unwrap_or(0) + b.total_degree().unwrap_or(0))?;
                &a * &b
            }
            ExprKind::Div(a, b) => {
                let den = rec(b)?;
                let c = constant_of(&den).ok_or_else(|| semantic(e.pos, "divisor must be a nonzero constant"))?;
                rec(a)?.scale(&(BigRational::one() / c))
            }
            ExprKind::Pow(x, n) => {
                let x = rec(x)?;
                degree_guard(e.pos, x.total_degree().unwrap_or(0).max(1).saturating_mul(*n))?;
                x.pow(*n)
            }
        })
    }
}

fn constant_of(x: &GrassmannElement) -> Option<BigRational> {
    if x.terms().any(|(m, _)| m != 0) {
        return None;
    }
    x.body().constant_value().filter(|c| !c.is_zero())
}

/// Builds a smooth function of `arity` arguments `y1..yk` from an expression. Distinct atom
/// calls become extra slots of a polynomial outer function, ordered by their text.
fn function(e: &Expr, arity: usize) -> PResult<SmoothFn> {
    let mut calls: BTreeMap<String, SmoothFn> = BTreeMap::new();
    collect_calls(e, arity, &mut calls)?;
    if calls.is_empty() {
        return Ok(SmoothFn::Poly(fn_poly(e, arity, &BTreeMap::new())?));
    }
    let slots: BTreeMap<String, usize> = calls.keys().enumerate().map(|(i, k)| (k.clone(), arity + i)).collect();
    let outer = fn_poly(e, arity + calls.len(), &slots)?;
    let mut inner: Vec<SmoothFn> = (0..arity).map(|i| SmoothFn::projection(arity, i)).collect();
    inner.extend(calls.into_values());
    SmoothFn::compose(SmoothFn::Poly(outer), inner).map_err(|err| semantic(e.pos, err.to_string()))
}

fn call_fn(name: &str, arg: &Expr, arity: usize, pos: Pos) -> PResult<SmoothFn> {
    let atom = SmoothAtom::from_name(name).ok_or_else(|| semantic(pos, format!("unknown function `{name}`")))?;
    let inner = function(arg, arity)?;
    SmoothFn::compose(SmoothFn::Atom(atom), vec![inner]).map_err(|err| semantic(pos, err.to_string()))
}

fn collect_calls(e: &Expr, arity: usize, calls: &mut BTreeMap<String, SmoothFn>) -> PResult<()> {
    match &e.kind {
        ExprKind::Num(_) | ExprKind::Var(_) => Ok(()),
        ExprKind::Call(f, arg) => {
            let c = call_fn(f, arg, arity, e.pos)?;
            calls.insert(c.to_text(), c);
            Ok(())
        }
        ExprKind::Neg(x) | ExprKind::Pow(x, _) => collect_calls(x, arity, calls),
        ExprKind::Add(a, b) | ExprKind::Sub(a, b) | ExprKind::Mul(a, b) | ExprKind::Div(a, b) => {
            collect_calls(a, arity, calls)?;
            collect_calls(b, arity, calls)
        }
    }
}

fn fn_poly(e: &Expr, nvars: usize, slots: &BTreeMap<String, usize>) -> PResult<Polynomial> {
    let rec = |x: &Expr| fn_poly(x, nvars, slots);
    let arity = nvars - slots.len();
    Ok(match &e.kind {
        ExprKind::Num(n) => Polynomial::constant(nvars, BigRational::from_integer(n.clone())),
        ExprKind::Var(v) => {
            let i = v
                .strip_prefix('y')
                .and_then(|s| s.parse::<usize>().ok())
                .filter(|i| (1..=arity).contains(i))
                .ok_or_else(|| semantic(e.pos, format!("unknown argument `{v}`; expected y1..y{arity}")))?;
            Polynomial::var(nvars, i - 1)
        }
        ExprKind::Call(f, arg) => {
            let key = call_fn(f, arg, arity, e.pos)?.to_text();
            Polynomial::var(nvars, slots[&key])
        }
        ExprKind::Neg(x) => rec(x)?.scale(&-BigRational::one()),
        ExprKind::Add(a, b) => &rec(a)? + &rec(b)?,
        ExprKind::Sub(a, b) => &rec(a)? - &rec(b)?,
        ExprKind::Mul(a, b) => {
            let (a, b) = (rec(a)?, rec(b)?);
            degree_guard(e.pos, a.degree().unwrap_or(0) + b.degree().unwrap_or(0))?;
            &a * &b
        }
        ExprKind::Div(a, b) => {
            let c = rec(b)?
                .constant_value()
                .filter(|c| !c.is_zero())
                .ok_or_else(|| semantic(e.pos, "divisor must be a nonzero constant"))?;
            rec(a)?.scale(&(BigRational::one() / c))
        }
        ExprKind::Pow(x, n) => {
            let x = rec(x)?;
            degree_guard(e.pos, x.degree().unwrap_or(0).max(1).saturating_mul(*n))?;
            x.pow(*n)
        }
    })
}
