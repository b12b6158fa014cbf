use crate::trace::Variable;

use super::{Program, Rule};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalReport {
    pub normal: bool,
    /// One line per offending rule.
    pub violations: Vec<String>,
}

/// Normal form: temporal rules are `h :- Y p` or `S` rules, their bodies
/// avoid temporally-defined variables, and static bodies avoid
/// statically-defined ones. Input variables are allowed everywhere.
pub fn is_normal(program: &Program) -> NormalReport {
    let temporal = |v: &Variable| program.definition(v).is_some_and(Rule::is_temporal);
    let statically = |v: &Variable| program.definition(v).is_some_and(|r| !r.is_temporal());
    let mut violations = Vec::new();
    for r in program.rules() {
        match r {
            Rule::Dynamic { operator, .. } if operator != "S" => {
                violations.push(format!("`{r}`: operator `{operator}` is not allowed in normal programs"));
            }
            Rule::Static { .. } => {
                if let Some(v) = r.body_vars().into_iter().find(|v| statically(v)) {
                    violations.push(format!("`{r}`: static body mentions statically-defined `{v}`"));
                }
            }
            _ => {
                if let Some(v) = r.body_vars().into_iter().find(|v| temporal(v)) {
                    violations.push(format!("`{r}`: temporal body mentions temporally-defined `{v}`"));
                }
            }
        }
    }
    NormalReport {
        normal: violations.is_empty(),
        violations,
    }
}

/// Every rule body has at most one occurrence of a defined variable.
pub fn is_treelike(program: &Program) -> bool {
    program
        .rules()
        .iter()
        .all(|r| r.body_occurrences().iter().filter(|v| program.is_defined(v)).count() <= 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::programs::parse_program;

    fn normal(text: &str) -> bool {
        is_normal(&parse_program(text).unwrap()).normal
    }

    #[test]
    fn normality() {
        assert!(normal("h :- Y p.\np :- a & b."));
        assert!(!normal("h :- Y p.\np :- Y a."));
        assert!(normal("h :- q & r.\nq :- Y a.\nr :- Y b."));
        assert!(!normal("e, o :- P(a)."));
        assert!(!normal("h :- p.\np :- a."));
        let report = is_normal(&parse_program("h :- Y p.\np :- Y a.").unwrap());
        assert_eq!(report.violations.len(), 1);
    }

    #[test]
    fn treelike() {
        let t = |s: &str| is_treelike(&parse_program(s).unwrap());
        assert!(t("h :- q & a.\nq :- Y a."));
        assert!(!t("h :- q & r.\nq :- Y a.\nr :- Y b."));
        assert!(t("h :- a & b.\ng :- !a."));
        assert!(!t("h :- q & !q.\nq :- Y a."));
    }
}
