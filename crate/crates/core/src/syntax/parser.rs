use super::ast::*;
use super::lexer::{tokenize, Tok, Token};
use super::ParseError;

/// Parses AuDaLa source text.
///
/// The grammar is the one used by the listings: struct definitions with
/// parameter lists and step bodies, followed by the schedule. `=` and `==`
/// are both equality, `then` after an if-condition is optional, and
/// `else if` / `else` chains are kept as sugar for [`super::desugar`].
pub fn parse_program(source: &str) -> Result<Program, ParseError> {
    let tokens = tokenize(source)?;
    let mut p = Parser { tokens, at: 0 };
    p.program()
}

/// Parses a standalone schedule such as `init < Fix(reachability)`.
pub fn parse_schedule(source: &str) -> Result<Schedule, ParseError> {
    let tokens = tokenize(source)?;
    let mut p = Parser { tokens, at: 0 };
    let sched = p.schedule()?;
    p.expect_eof()?;
    Ok(sched)
}

struct Parser {
    tokens: Vec<Token>,
    at: usize,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.at].tok
    }

    fn peek_at(&self, n: usize) -> &Tok {
        let i = (self.at + n).min(self.tokens.len() - 1);
        &self.tokens[i].tok
    }

    fn pos(&self) -> Pos {
        self.tokens[self.at].pos
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.at].clone();
        if self.at + 1 < self.tokens.len() {
            self.at += 1;
        }
        t
    }

    fn check(&self, tok: &Tok) -> bool {
        self.peek() == tok
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.check(tok) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Keyword(k) if *k == kw)
    }

    fn eat_keyword(&mut self, kw: &str) -> bool {
        if self.is_keyword(kw) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn unexpected(&self, wanted: &str) -> ParseError {
        ParseError::new(self.pos(), format!("expected {wanted}, found {}", self.peek().describe()))
    }

    fn expect(&mut self, tok: Tok) -> PResult<Pos> {
        if self.check(&tok) {
            Ok(self.bump().pos)
        } else {
            Err(self.unexpected(&tok.describe()))
        }
    }

    fn expect_eof(&self) -> PResult<()> {
        if self.check(&Tok::Eof) {
            Ok(())
        } else {
            Err(self.unexpected("end of input"))
        }
    }

    fn ident(&mut self, what: &str) -> PResult<Name> {
        match self.peek().clone() {
            Tok::Ident(text) => {
                let pos = self.bump().pos;
                Ok(Name::new(text, pos))
            }
            Tok::Keyword(k) => Err(ParseError::keyword_as_identifier(self.pos(), k)),
            _ => Err(self.unexpected(what)),
        }
    }

    fn program(&mut self) -> PResult<Program> {
        let mut structs = Vec::new();
        while self.is_keyword("struct") {
            structs.push(self.struct_def()?);
        }
        let schedule = self.schedule()?;
        self.expect_eof()?;
        Ok(Program { structs, schedule })
    }

    fn struct_def(&mut self) -> PResult<StructDef> {
        self.bump();
        let name = self.ident("struct name")?;
        let mut params = Vec::new();
        if self.eat(&Tok::LParen) {
            if !self.check(&Tok::RParen) {
                loop {
                    let pname = self.ident("parameter name")?;
                    self.expect(Tok::Colon)?;
                    let ty = self.syn_type()?;
                    params.push(Param { name: pname, ty });
                    if !self.eat(&Tok::Comma) {
                        break;
                    }
                }
            }
            self.expect(Tok::RParen)?;
        }
        self.expect(Tok::LBrace)?;
        let mut steps = Vec::new();
        while !self.check(&Tok::RBrace) {
            let sname = self.ident("step name")?;
            let body = self.block()?;
            steps.push(StepDef { name: sname, body });
        }
        self.bump();
        Ok(StructDef { name, params, steps })
    }

    fn syn_type(&mut self) -> PResult<SynType> {
        match self.peek().clone() {
            Tok::Keyword("Nat") => {
                self.bump();
                Ok(SynType::Nat)
            }
            Tok::Keyword("Int") => {
                self.bump();
                Ok(SynType::Int)
            }
            Tok::Keyword("Bool") => {
                self.bump();
                Ok(SynType::Bool)
            }
            Tok::Keyword("String") => {
                self.bump();
                Ok(SynType::String)
            }
            Tok::Ident(name) if name == "Array" && *self.peek_at(1) == Tok::LParen => {
                self.bump();
                self.bump();
                let elem = self.syn_type()?;
                self.expect(Tok::RParen)?;
                Ok(SynType::Array(Box::new(elem)))
            }
            Tok::Ident(name) => {
                self.bump();
                Ok(SynType::Struct(name))
            }
            Tok::Keyword(k) => Err(ParseError::keyword_as_identifier(self.pos(), k)),
            _ => Err(self.unexpected("a type")),
        }
    }

    fn block(&mut self) -> PResult<Vec<Stmt>> {
        self.expect(Tok::LBrace)?;
        let mut stmts = Vec::new();
        while !self.check(&Tok::RBrace) {
            if self.check(&Tok::Eof) {
                return Err(self.unexpected("`}`"));
            }
            stmts.push(self.stmt()?);
        }
        self.bump();
        Ok(stmts)
    }

    fn stmt(&mut self) -> PResult<Stmt> {
        if self.is_keyword("if") {
            return self.if_stmt().map(Stmt::If);
        }
        let starts_decl = match (self.peek(), self.peek_at(1)) {
            (Tok::Keyword("Nat" | "Int" | "Bool" | "String"), _) => true,
            (Tok::Ident(a), Tok::LParen) if a == "Array" => true,
            (Tok::Ident(_), Tok::Ident(_) | Tok::Keyword(_)) => true,
            _ => false,
        };
        if starts_decl {
            let ty = self.syn_type()?;
            let name = self.ident("variable name")?;
            self.expect(Tok::Assign)?;
            let value = self.expr()?;
            self.expect(Tok::Semi)?;
            return Ok(Stmt::VarDecl { ty, name, value, slot: None });
        }
        match (self.peek(), self.peek_at(1)) {
            (Tok::Ident(_), Tok::LParen) => {
                let ty = self.ident("struct name")?;
                let args = self.args()?;
                self.expect(Tok::Semi)?;
                Ok(Stmt::Construct { ty, args })
            }
            (Tok::Ident(_), _) => {
                let target = self.var_chain()?;
                self.expect(Tok::Assign)?;
                let value = self.expr()?;
                self.expect(Tok::Semi)?;
                Ok(Stmt::Update { target, value })
            }
            (Tok::Keyword(k), _) => Err(ParseError::keyword_as_identifier(self.pos(), k)),
            _ => Err(self.unexpected("a statement")),
        }
    }

    fn if_stmt(&mut self) -> PResult<IfStmt> {
        let pos = self.pos();
        self.bump();
        let mut branches = vec![self.guarded_block()?];
        let mut otherwise = None;
        while self.eat_keyword("else") {
            if self.eat_keyword("if") {
                branches.push(self.guarded_block()?);
            } else {
                otherwise = Some(self.block()?);
                break;
            }
        }
        Ok(IfStmt { branches, otherwise, pos })
    }

    fn guarded_block(&mut self) -> PResult<(Expr, Vec<Stmt>)> {
        let cond = self.expr()?;
        self.eat_keyword("then");
        let body = self.block()?;
        Ok((cond, body))
    }

    fn args(&mut self) -> PResult<Vec<Expr>> {
        self.expect(Tok::LParen)?;
        let mut args = Vec::new();
        if !self.check(&Tok::RParen) {
            loop {
                args.push(self.expr()?);
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
        }
        self.expect(Tok::RParen)?;
        Ok(args)
    }

    fn var_chain(&mut self) -> PResult<VarChain> {
        let head = self.ident("variable")?;
        let mut chain = VarChain::simple(head);
        loop {
            if self.eat(&Tok::Dot) {
                let name = self.ident("field name")?;
                chain.segments.push(Segment::Field { name, slot: None });
            } else if self.eat(&Tok::LBracket) {
                let index = self.expr()?;
                self.expect(Tok::RBracket)?;
                chain.segments.push(Segment::Index(Box::new(index)));
            } else {
                return Ok(chain);
            }
        }
    }

    pub(crate) fn expr(&mut self) -> PResult<Expr> {
        self.binary(1)
    }

    fn binary_op(&self) -> Option<BinOp> {
        Some(match self.peek() {
            Tok::EqEq => BinOp::Eq,
            Tok::Ne => BinOp::Ne,
            Tok::Lt => BinOp::Lt,
            Tok::Le => BinOp::Le,
            Tok::Gt => BinOp::Gt,
            Tok::Ge => BinOp::Ge,
            Tok::AndAnd => BinOp::And,
            Tok::OrOr => BinOp::Or,
            Tok::Plus => BinOp::Add,
            Tok::Minus => BinOp::Sub,
            Tok::Star => BinOp::Mul,
            Tok::Slash => BinOp::Div,
            Tok::Percent => BinOp::Rem,
            _ => return None,
        })
    }

    fn binary(&mut self, min_prec: u8) -> PResult<Expr> {
        let mut lhs = self.unary()?;
        while let Some(op) = self.binary_op().filter(|op| op.precedence() >= min_prec) {
            let pos = self.bump().pos;
            let rhs = self.binary(op.precedence() + 1)?;
            lhs = Expr::Binary { op, lhs: Box::new(lhs), rhs: Box::new(rhs), pos };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<Expr> {
        let pos = self.pos();
        if self.eat(&Tok::Bang) {
            let inner = self.unary()?;
            return Ok(Expr::Not(Box::new(inner), pos));
        }
        if self.eat(&Tok::Minus) {
            if let Tok::Int(n) = *self.peek() {
                self.bump();
                return Ok(Expr::Lit(Literal::Int(-n), pos));
            }
            let inner = self.unary()?;
            return Ok(Expr::Binary {
                op: BinOp::Sub,
                lhs: Box::new(Expr::Lit(Literal::Int(0), pos)),
                rhs: Box::new(inner),
                pos,
            });
        }
        self.primary()
    }

    fn primary(&mut self) -> PResult<Expr> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(Expr::Lit(Literal::Int(n), pos))
            }
            Tok::Str(s) => {
                self.bump();
                Ok(Expr::Lit(Literal::Str(s), pos))
            }
            Tok::Keyword("true") => {
                self.bump();
                Ok(Expr::Lit(Literal::Bool(true), pos))
            }
            Tok::Keyword("false") => {
                self.bump();
                Ok(Expr::Lit(Literal::Bool(false), pos))
            }
            Tok::Keyword("null") => {
                self.bump();
                Ok(Expr::Null { ty: None, pos })
            }
            Tok::Keyword("this") => {
                self.bump();
                Ok(Expr::This(pos))
            }
            Tok::Keyword("array") => {
                self.bump();
                self.expect(Tok::LParen)?;
                let size = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(Expr::ArrayNew { size: Box::new(size), elem: None, pos })
            }
            Tok::LParen => {
                self.bump();
                let inner = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            Tok::Ident(_) if *self.peek_at(1) == Tok::LParen => {
                let ty = self.ident("struct name")?;
                let args = self.args()?;
                Ok(Expr::Construct { ty, args })
            }
            Tok::Ident(_) => Ok(Expr::Var(self.var_chain()?)),
            Tok::Keyword(k) => Err(ParseError::keyword_as_identifier(pos, k)),
            _ => Err(self.unexpected("an expression")),
        }
    }

    fn schedule(&mut self) -> PResult<Schedule> {
        let mut items = Vec::new();
        if matches!(self.peek(), Tok::Eof | Tok::RParen | Tok::Comma) {
            return Ok(Schedule { items });
        }
        loop {
            items.push(self.schedule_item()?);
            if !self.eat(&Tok::Lt) {
                break;
            }
        }
        Ok(Schedule { items })
    }

    fn schedule_item(&mut self) -> PResult<ScheduleItem> {
        if self.eat_keyword("Fix") {
            self.expect(Tok::LParen)?;
            let body = self.schedule()?;
            if body.items.is_empty() {
                return Err(self.unexpected("a schedule inside `Fix`"));
            }
            let mut params = Vec::new();
            while self.eat(&Tok::Comma) {
                params.push(self.ident("parameter name")?);
            }
            self.expect(Tok::RParen)?;
            return Ok(if params.is_empty() { ScheduleItem::Fix(body) } else { ScheduleItem::FixOn(body, params) });
        }
        if self.eat_keyword("Iter") {
            self.expect(Tok::LParen)?;
            let mut steps = Vec::new();
            loop {
                if self.is_keyword("Fix") || self.is_keyword("Iter") {
                    return Err(ParseError::new(
                        self.pos(),
                        "an iterator contains step names only; nested fixpoints and iterators are not allowed",
                    ));
                }
                steps.push(self.ident("step name")?);
                if !self.eat(&Tok::Semi) {
                    break;
                }
            }
            self.expect(Tok::RParen)?;
            return Ok(ScheduleItem::Iter(steps));
        }
        let first = self.ident("step name")?;
        if self.eat(&Tok::Dot) {
            let step = self.ident("step name")?;
            Ok(ScheduleItem::LocalCall { ty: first, step })
        } else {
            Ok(ScheduleItem::GlobalCall(first))
        }
    }
}
