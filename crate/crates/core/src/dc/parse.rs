use super::{DcError, DenialConstraint, Operator, Predicate, TupleVar};
use crate::relation::Relation;

/// Parses `!(s.A == t.A & s.B < t.C)`.
///
/// Operators are `==` (or `=`), `!=`, `<`, `<=`, `>`, `>=`. Attribute names that
/// are not plain identifiers are written in backticks: ``s.`Fed Tax` > t.`Fed Tax` ``.
/// `¬` and `∧` are accepted in place of `!` and `&`.
pub fn parse_dc(text: &str, relation: &Relation) -> Result<DenialConstraint, DcError> {
    let mut p = Parser { src: text, pos: 0 };
    p.skip_ws();
    if !(p.eat("!") || p.eat("¬")) {
        return Err(p.error("expected `!(`"));
    }
    p.skip_ws();
    if !p.eat("(") {
        return Err(p.error("expected `(`"));
    }
    let mut predicates = Vec::new();
    loop {
        predicates.push(p.predicate(relation)?);
        p.skip_ws();
        if p.eat("&") || p.eat("∧") {
            p.eat("&");
            continue;
        }
        if p.eat(")") {
            break;
        }
        return Err(p.error("expected `&` or `)`"));
    }
    p.skip_ws();
    if p.pos != text.len() {
        return Err(p.error("unexpected trailing input"));
    }
    let dc = DenialConstraint::new(predicates)?;
    dc.validate(relation)?;
    Ok(dc)
}

pub fn format_predicate(p: &Predicate, relation: &Relation) -> String {
    format!(
        "{}.{} {} {}.{}",
        p.left_var.name(),
        quote(&relation.column(p.left_attr).name),
        p.op,
        p.right_var.name(),
        quote(&relation.column(p.right_attr).name),
    )
}

/// Inverse of [`parse_dc`].
pub fn format_dc(dc: &DenialConstraint, relation: &Relation) -> String {
    let body: Vec<String> = dc.predicates.iter().map(|p| format_predicate(p, relation)).collect();
    format!("!({})", body.join(" & "))
}

fn is_ident(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn quote(name: &str) -> String {
    if is_ident(name) {
        name.to_string()
    } else {
        format!("`{name}`")
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn rest(&self) -> &str {
        &self.src[self.pos..]
    }

    fn error(&self, message: &str) -> DcError {
        DcError::Parse {
            offset: self.pos,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
    }

    fn eat(&mut self, token: &str) -> bool {
        if self.rest().starts_with(token) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn predicate(&mut self, relation: &Relation) -> Result<Predicate, DcError> {
        let (lv, la) = self.operand(relation)?;
        self.skip_ws();
        let op = self.operator()?;
        let (rv, ra) = self.operand(relation)?;
        Ok(Predicate::new(lv, la, op, rv, ra))
    }

    fn operator(&mut self) -> Result<Operator, DcError> {
        // Longest tokens first so `<=` is not read as `<`.
        const TOKENS: [(&str, Operator); 8] = [
            ("==", Operator::Eq),
            ("!=", Operator::Neq),
            ("<>", Operator::Neq),
            ("<=", Operator::Le),
            (">=", Operator::Ge),
            ("=", Operator::Eq),
            ("<", Operator::Lt),
            (">", Operator::Gt),
        ];
        for (tok, op) in TOKENS {
            if self.eat(tok) {
                return Ok(op);
            }
        }
        Err(self.error("expected a comparison operator"))
    }

    fn operand(&mut self, relation: &Relation) -> Result<(TupleVar, usize), DcError> {
        self.skip_ws();
        let var = if self.eat("s") {
            TupleVar::S
        } else if self.eat("t") {
            TupleVar::T
        } else {
            return Err(self.error("expected tuple variable `s` or `t`"));
        };
        if !self.eat(".") {
            return Err(self.error("expected `.` after tuple variable"));
        }
        let name = if self.eat("`") {
            let end = self
                .rest()
                .find('`')
                .ok_or_else(|| self.error("unterminated backtick"))?;
            let name = self.rest()[..end].to_string();
            self.pos += end + 1;
            name
        } else {
            let len = self
                .rest()
                .find(|c: char| !(c.is_ascii_alphanumeric() || c == '_'))
                .unwrap_or(self.rest().len());
            if len == 0 {
                return Err(self.error("expected attribute name"));
            }
            let name = self.rest()[..len].to_string();
            self.pos += len;
            name
        };
        let attr = relation.column_index(&name).ok_or(DcError::UnknownAttribute(name))?;
        Ok((var, attr))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relation::RelationBuilder;
    use Operator::*;

    fn rel() -> Relation {
        RelationBuilder::new("tax")
            .text("State", ["a"])
            .int("Salary", [1])
            .int("Fed Tax", [1])
            .build()
            .unwrap()
    }

    #[test]
    fn round_trip() {
        let r = rel();
        let text = "!(s.State == t.State & s.Salary < t.Salary & s.`Fed Tax` > t.`Fed Tax`)";
        let dc = parse_dc(text, &r).unwrap();
        assert_eq!(
            dc.predicates,
            vec![
                Predicate::pair(0, Eq, 0),
                Predicate::pair(1, Lt, 1),
                Predicate::pair(2, Gt, 2)
            ]
        );
        assert_eq!(format_dc(&dc, &r), text);
    }

    #[test]
    fn lenient_spelling() {
        let r = rel();
        let dc = parse_dc(" ¬( t.Salary>=s.Salary ∧ s.State=t.State ) ", &r).unwrap();
        assert_eq!(
            dc.predicates,
            vec![Predicate::pair(1, Le, 1), Predicate::pair(0, Eq, 0)]
        );
        let dc = parse_dc("!(s.Salary <= s.`Fed Tax` && s.State <> t.State)", &r).unwrap();
        assert_eq!(dc.predicates[0], Predicate::new(TupleVar::S, 1, Le, TupleVar::S, 2));
        assert_eq!(dc.predicates[1].op, Neq);
    }

    #[test]
    fn errors() {
        let r = rel();
        assert!(matches!(
            parse_dc("(s.Salary < t.Salary)", &r),
            Err(DcError::Parse { offset: 0, .. })
        ));
        assert!(matches!(
            parse_dc("!(s.Salary ~ t.Salary)", &r),
            Err(DcError::Parse { offset: 11, .. })
        ));
        assert!(matches!(
            parse_dc("!(s.Salary < t.Salary", &r),
            Err(DcError::Parse { .. })
        ));
        assert_eq!(
            parse_dc("!(s.Zip == t.Zip)", &r),
            Err(DcError::UnknownAttribute("Zip".into()))
        );
        assert!(matches!(
            parse_dc("!(s.State < t.State)", &r),
            Err(DcError::IllegalOperator { .. })
        ));
        assert!(matches!(
            parse_dc("!(s.State == t.Salary)", &r),
            Err(DcError::Incomparable { .. })
        ));
    }
}
