use minisim_core::minisol::{
    erase_locations, expected_site_count, pretty_print, tokenize, BranchKind, Token, TokenKind,
};
use minisim_core::parse;
use proptest::prelude::*;

const CORPUS: [(&str, &str); 3] = [
    ("lottery", include_str!("../../../corpus/lottery.msol")),
    ("ponzi", include_str!("../../../corpus/ponzi.msol")),
    ("bank", include_str!("../../../corpus/bank.msol")),
];

#[test]
fn corpus_round_trips_through_pretty_printer() {
    for (name, src) in CORPUS {
        let model = parse(src).unwrap();
        let printed = pretty_print(&model);
        let reparsed = parse(&printed).unwrap_or_else(|e| panic!("{name}: {e}\n{printed}"));
        assert_eq!(
            erase_locations(&reparsed),
            erase_locations(&model),
            "{name}"
        );
        // printing is a fixed point after one pass
        assert_eq!(pretty_print(&reparsed), printed, "{name}");
    }
}

#[test]
fn broken_fixture_reports_position() {
    let err = parse(include_str!("../../../corpus/broken.msol")).unwrap_err();
    assert!(err.line >= 1 && err.column >= 1);
}

// ---------------------------------------------------------------------------
// Random contracts with a known site census

#[derive(Debug, Clone)]
enum GenStmt {
    Simple(&'static str),
    Require(&'static str),
    If(&'static str, Vec<GenStmt>, Option<Vec<GenStmt>>),
}

#[derive(Debug, Clone)]
struct GenFunction {
    payable: bool,
    with_params: bool,
    body: Vec<GenStmt>,
}

const SIMPLE: &[&str] = &[
    "x += 1;",
    "x = x * 2 + p;",
    "a = msg.sender;",
    "m[msg.sender] += msg.value;",
    "arr.push(q);",
    "delete arr;",
    "q.transfer(0);",
    "random(3);",
    "x = random(arr.length + 1);",
];

const CONDS: &[&str] = &[
    "x > 1",
    "msg.value == 0 && x < 5",
    "!(msg.sender == owner)",
    "a != null || p >= 3",
    "m[q] <= this.balance",
    "arr.length % 2 == 0",
];

fn stmt() -> impl Strategy<Value = GenStmt> {
    let leaf = prop_oneof![
        3 => prop::sample::select(SIMPLE).prop_map(GenStmt::Simple),
        1 => prop::sample::select(CONDS).prop_map(GenStmt::Require),
    ];
    leaf.prop_recursive(4, 24, 4, |inner| {
        (
            prop::sample::select(CONDS),
            prop::collection::vec(inner.clone(), 0..4),
            prop::option::of(prop::collection::vec(inner, 0..4)),
        )
            .prop_map(|(c, t, e)| GenStmt::If(c, t, e))
    })
}

fn function() -> impl Strategy<Value = GenFunction> {
    (
        any::<bool>(),
        any::<bool>(),
        prop::collection::vec(stmt(), 0..6),
    )
        .prop_map(|(payable, with_params, body)| GenFunction {
            payable,
            with_params,
            body,
        })
}

fn render_block(stmts: &[GenStmt], depth: usize, out: &mut String) {
    let pad = "    ".repeat(depth);
    for s in stmts {
        match s {
            GenStmt::Simple(text) => out.push_str(&format!("{pad}{text}\n")),
            GenStmt::Require(c) => out.push_str(&format!("{pad}require({c});\n")),
            GenStmt::If(c, then, els) => {
                out.push_str(&format!("{pad}if ({c}) {{\n"));
                render_block(then, depth + 1, out);
                match els {
                    Some(els) => {
                        out.push_str(&format!("{pad}}} else {{\n"));
                        render_block(els, depth + 1, out);
                        out.push_str(&format!("{pad}}}\n"));
                    }
                    None => out.push_str(&format!("{pad}}}\n")),
                }
            }
        }
    }
}

/// `p` and `q` are always in scope: as parameters or as state variables.
fn render(funcs: &[GenFunction]) -> String {
    let mut out = String::from(
        "contract Gen {\n    uint x;\n    address a;\n    mapping(address => uint) m;\n    address[] arr;\n",
    );
    let needs_state = funcs.iter().any(|f| !f.with_params);
    if needs_state {
        out.push_str("    uint p;\n    address q;\n");
    }
    for (i, f) in funcs.iter().enumerate() {
        let params = if f.with_params && !needs_state {
            "uint p, address q"
        } else {
            ""
        };
        let payable = if f.payable { " payable" } else { "" };
        out.push_str(&format!("    function f{i}({params}){payable} {{\n"));
        render_block(&f.body, 2, &mut out);
        out.push_str("    }\n");
    }
    out.push_str("}\n");
    out
}

/// Expected site kinds in numbering order: parents before their children.
fn expected_kinds(stmts: &[GenStmt], out: &mut Vec<BranchKind>) {
    for s in stmts {
        match s {
            GenStmt::Simple(_) => {}
            GenStmt::Require(_) => out.extend([BranchKind::RequirePass, BranchKind::RequireFail]),
            GenStmt::If(_, then, els) => {
                out.extend([BranchKind::IfThen, BranchKind::IfElse]);
                expected_kinds(then, out);
                if let Some(els) = els {
                    expected_kinds(els, out);
                }
            }
        }
    }
}

fn conditionals(stmts: &[GenStmt]) -> usize {
    stmts
        .iter()
        .map(|s| match s {
            GenStmt::Simple(_) => 0,
            GenStmt::Require(_) => 1,
            GenStmt::If(_, t, e) => 1 + conditionals(t) + e.as_deref().map_or(0, conditionals),
        })
        .sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn site_census_matches_closed_form(funcs in prop::collection::vec(function(), 0..5)) {
        let src = render(&funcs);
        let model = parse(&src).map_err(|e| TestCaseError::fail(format!("{e}\n{src}")))?;

        let closed_form: usize = funcs.iter().map(|f| 1 + 2 * conditionals(&f.body)).sum();
        prop_assert_eq!(model.branch_sites.len(), closed_form);
        prop_assert_eq!(expected_site_count(&model), closed_form);

        let mut kinds = Vec::new();
        for f in &funcs {
            kinds.push(BranchKind::Entry);
            expected_kinds(&f.body, &mut kinds);
        }
        let actual: Vec<_> = model.branch_sites.iter().map(|s| s.kind).collect();
        prop_assert_eq!(actual, kinds);
        for (i, site) in model.branch_sites.iter().enumerate() {
            prop_assert_eq!(site.id as usize, i);
        }
    }

    #[test]
    fn generated_contracts_round_trip(funcs in prop::collection::vec(function(), 1..4)) {
        let model = parse(&render(&funcs)).unwrap();
        let reparsed = parse(&pretty_print(&model)).unwrap();
        prop_assert_eq!(erase_locations(&reparsed), erase_locations(&model));
    }
}

// ---------------------------------------------------------------------------
// One-token deletions

fn lexeme(kind: &TokenKind) -> String {
    use TokenKind::*;
    let s = match kind {
        Ident(name) => return name.clone(),
        Int(v) => return v.to_string(),
        Contract => "contract",
        Function => "function",
        Payable => "payable",
        Uint => "uint",
        Address => "address",
        Mapping => "mapping",
        Require => "require",
        If => "if",
        Else => "else",
        Delete => "delete",
        True => "true",
        False => "false",
        Null => "null",
        Msg => "msg",
        This => "this",
        Random => "random",
        LBrace => "{",
        RBrace => "}",
        LParen => "(",
        RParen => ")",
        LBracket => "[",
        RBracket => "]",
        Semi => ";",
        Comma => ",",
        Dot => ".",
        Assign => "=",
        PlusAssign => "+=",
        MinusAssign => "-=",
        EqEq => "==",
        NotEq => "!=",
        Lt => "<",
        Gt => ">",
        Le => "<=",
        Ge => ">=",
        Plus => "+",
        Minus => "-",
        Star => "*",
        Slash => "/",
        Percent => "%",
        AndAnd => "&&",
        OrOr => "||",
        Bang => "!",
        FatArrow => "=>",
        Eof => "",
    };
    s.to_owned()
}

/// Deletions that leave a sentence of the grammar: an optional `payable`,
/// a prefix `!`, `random` inside an expression (its argument becomes a
/// parenthesised expression), and `else` directly before `if`.
fn deletion_is_grammatical(tokens: &[Token], i: usize) -> bool {
    let prev = i.checked_sub(1).map(|p| &tokens[p].kind);
    let next = tokens.get(i + 1).map(|t| &t.kind);
    match tokens[i].kind {
        TokenKind::Payable | TokenKind::Bang => true,
        TokenKind::Random => !matches!(
            prev,
            Some(TokenKind::Semi | TokenKind::LBrace | TokenKind::RBrace)
        ),
        TokenKind::Else => next == Some(&TokenKind::If),
        _ => false,
    }
}

#[test]
fn one_token_deletions_are_rejected() {
    let mut rejected = 0;
    for (name, src) in CORPUS {
        let tokens: Vec<Token> = tokenize(src)
            .unwrap()
            .into_iter()
            .filter(|t| t.kind != TokenKind::Eof)
            .collect();
        for i in 0..tokens.len() {
            let mutated: Vec<String> = tokens
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, t)| lexeme(&t.kind))
                .collect();
            let mutated = mutated.join(" ");
            if deletion_is_grammatical(&tokens, i) {
                continue;
            }
            assert!(
                parse(&mutated).is_err(),
                "{name}: deleting {} at {} still parses",
                tokens[i].kind,
                tokens[i].span
            );
            rejected += 1;
        }
    }
    assert!(rejected > 300);
}

#[test]
fn errors_point_at_the_offending_token() {
    let err = parse("contract X {\n  function f( }").unwrap_err();
    assert_eq!((err.line, err.column), (2, 15));
}
