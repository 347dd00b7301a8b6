//! Exhaustive enumeration of small ground terms.

use crate::terms::{Sort, Symbol, Term};

/// All ground terms over `symbols` of the given sort with size at most
/// `max_size`, ordered by size and then by construction order.
pub fn ground_terms<'a>(
    symbols: impl IntoIterator<Item = &'a Symbol>,
    sort: Sort,
    max_size: usize,
) -> Vec<Term> {
    let by_size = table(symbols, max_size);
    (1..=max_size)
        .flat_map(|n| by_size[n].get(sort).iter().cloned())
        .collect()
}

/// All ground terms of sort `sort` with exactly `size` symbols.
pub fn ground_terms_of_size<'a>(
    symbols: impl IntoIterator<Item = &'a Symbol>,
    sort: Sort,
    size: usize,
) -> Vec<Term> {
    table(symbols, size)[size].get(sort).clone()
}

#[derive(Default, Clone)]
struct BySort {
    data: Vec<Term>,
    stream: Vec<Term>,
}

impl BySort {
    fn get(&self, sort: Sort) -> &Vec<Term> {
        match sort {
            Sort::Data => &self.data,
            Sort::Stream => &self.stream,
        }
    }

    fn get_mut(&mut self, sort: Sort) -> &mut Vec<Term> {
        match sort {
            Sort::Data => &mut self.data,
            Sort::Stream => &mut self.stream,
        }
    }
}

fn table<'a>(symbols: impl IntoIterator<Item = &'a Symbol>, max_size: usize) -> Vec<BySort> {
    let symbols: Vec<&Symbol> = symbols.into_iter().collect();
    let mut by_size = vec![BySort::default(); max_size + 1];
    for size in 1..=max_size {
        for f in &symbols {
            let sorts: Vec<Sort> = f.arg_sorts().collect();
            if sorts.len() > size - 1 || (sorts.is_empty() && size != 1) {
                continue;
            }
            let mut built = Vec::new();
            fill_args(&by_size, &sorts, size - 1, &mut Vec::new(), &mut |args| {
                built.push(Term::app((*f).clone(), args.to_vec()));
            });
            by_size[size].get_mut(f.sort()).extend(built);
        }
    }
    by_size
}

fn fill_args(
    by_size: &[BySort],
    sorts: &[Sort],
    budget: usize,
    prefix: &mut Vec<Term>,
    emit: &mut impl FnMut(&[Term]),
) {
    let Some((&sort, rest)) = sorts.split_first() else {
        if budget == 0 {
            emit(prefix);
        }
        return;
    };
    // each remaining argument needs at least one symbol
    let max_here = budget.saturating_sub(rest.len());
    for n in 1..=max_here {
        for t in by_size[n].get(sort) {
            prefix.push(t.clone());
            fill_args(by_size, rest, budget - n, prefix, emit);
            prefix.pop();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_match_hand_enumeration() {
        let zero = Symbol::data("0", 0);
        let not = Symbol::data("not", 1);
        let c = Symbol::stream("c", 0, 0);
        let cons = Symbol::cons();
        let symbols = [zero, not, c, cons];
        // data: 0, not(0), not(not(0))
        assert_eq!(ground_terms(&symbols, Sort::Data, 3).len(), 3);
        // stream: c (1), 0:c (3), not(0):c (4), then size 5 with smaller heads first
        let streams = ground_terms(&symbols, Sort::Stream, 5);
        let shown: Vec<String> = streams.iter().map(Term::to_string).collect();
        assert_eq!(shown, ["c", "0:c", "not(0):c", "0:0:c", "not(not(0)):c"]);
        assert!(streams.iter().all(|t| t.check_sorts().is_ok()));
    }
}
