use super::ast::*;

/// Numbers every branch site in source order and records them on the model.
/// Re-running on an already numbered model yields the same numbering.
pub fn assign_branch_sites(mut model: ContractModel) -> ContractModel {
    let mut sites = Vec::new();
    for func in &mut model.functions {
        let mut alloc = Allocator {
            function: &func.name,
            sites: &mut sites,
        };
        func.entry_site = Some(alloc.next(BranchKind::Entry, func.span));
        alloc.block(&mut func.body);
    }
    model.branch_sites = sites;
    model
}

/// Closed-form site count: one entry per function plus two per conditional.
pub fn expected_site_count(model: &ContractModel) -> usize {
    fn conditionals(stmts: &[Stmt]) -> usize {
        stmts
            .iter()
            .map(|s| match &s.kind {
                StmtKind::Require { .. } => 1,
                StmtKind::If {
                    then_body,
                    else_body,
                    ..
                } => 1 + conditionals(then_body) + else_body.as_deref().map_or(0, conditionals),
                _ => 0,
            })
            .sum()
    }
    model
        .functions
        .iter()
        .map(|f| 1 + 2 * conditionals(&f.body))
        .sum()
}

struct Allocator<'a> {
    function: &'a str,
    sites: &'a mut Vec<BranchSite>,
}

impl Allocator<'_> {
    fn next(&mut self, kind: BranchKind, location: Span) -> SiteId {
        let id = self.sites.len() as SiteId;
        self.sites.push(BranchSite {
            id,
            function: self.function.to_string(),
            kind,
            location,
        });
        id
    }

    fn block(&mut self, stmts: &mut [Stmt]) {
        for stmt in stmts {
            let span = stmt.span;
            match &mut stmt.kind {
                StmtKind::Require { sites, .. } => {
                    *sites = Some(SitePair {
                        taken: self.next(BranchKind::RequirePass, span),
                        not_taken: self.next(BranchKind::RequireFail, span),
                    });
                }
                StmtKind::If {
                    then_body,
                    else_body,
                    sites,
                    ..
                } => {
                    *sites = Some(SitePair {
                        taken: self.next(BranchKind::IfThen, span),
                        not_taken: self.next(BranchKind::IfElse, span),
                    });
                    self.block(then_body);
                    if let Some(els) = else_body {
                        self.block(els);
                    }
                }
                _ => {}
            }
        }
    }
}
