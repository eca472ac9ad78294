use std::sync::{Arc, OnceLock};

use proptest::prelude::*;

use moonchain::bijections::{psi, swap_with_fillings};
use moonchain::chains::{brute_force_longest, longest, max_chain_through};
use moonchain::io::{emit, from_json, parse_grid, to_json, Document};
use moonchain::polyomino::comparable_shapes_within;
use moonchain::{f_map, make_swap_context, ne, phi, Direction, Filling, Polyomino, SwapContext};

fn shapes() -> &'static [Arc<Polyomino>] {
    static SHAPES: OnceLock<Vec<Arc<Polyomino>>> = OnceLock::new();
    SHAPES.get_or_init(|| {
        comparable_shapes_within(5, 5)
            .into_iter()
            .filter(|s| s.cell_count() <= 20)
            .map(Arc::new)
            .collect()
    })
}

fn swaps() -> &'static [SwapContext] {
    static SWAPS: OnceLock<Vec<SwapContext>> = OnceLock::new();
    SWAPS.get_or_init(|| {
        shapes()
            .iter()
            .flat_map(|s| (1..s.row_count()).filter_map(|i| make_swap_context(s.clone(), i).ok()))
            .collect()
    })
}

fn filling_of(shape: &Arc<Polyomino>, bits: u64) -> Filling {
    Filling::from_index_mask(shape, bits & ((1u64 << shape.cell_count()) - 1))
}

fn sparse(shape: &Arc<Polyomino>, picks: &[usize]) -> Filling {
    let cells = shape.rows().iter().enumerate().zip(picks).filter_map(|((r, iv), &p)| {
        let choice = p % (iv.len() + 1);
        (choice > 0).then(|| (r + 1, iv.start() + choice - 1))
    });
    Filling::from_cells(shape.clone(), cells).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn search_matches_brute_force(idx in any::<prop::sample::Index>(), bits in any::<u64>()) {
        let shape = idx.get(shapes());
        let f = filling_of(shape, bits);
        for dir in [Direction::Ne, Direction::Se] {
            prop_assert_eq!(longest(&f, dir), brute_force_longest(&f, dir).unwrap());
        }
    }

    #[test]
    fn chain_through_never_exceeds_longest(idx in any::<prop::sample::Index>(), bits in any::<u64>()) {
        let shape = idx.get(shapes());
        let f = filling_of(shape, bits);
        let best = ne(&f);
        for cell in f.ones() {
            prop_assert!(max_chain_through(&f, cell, Direction::Ne).unwrap() <= best);
        }
    }

    #[test]
    fn f_and_phi_are_inverted_by_the_reverse_swap(idx in any::<prop::sample::Index>(), bits in any::<u64>()) {
        let ctx = idx.get(swaps());
        let m = filling_of(ctx.source(), bits);
        let back = ctx.reverse();
        prop_assert_eq!(&f_map(&back, &f_map(ctx, &m).unwrap()).unwrap(), &m);
        let image = phi(ctx, &m).unwrap();
        prop_assert_eq!(ne(&image), ne(&m));
        prop_assert_eq!(image.col_sums(), m.col_sums());
        prop_assert_eq!(&phi(&back, &image).unwrap(), &m);
    }

    #[test]
    fn psi_exchanges_row_sums(idx in any::<prop::sample::Index>(), picks in prop::collection::vec(0usize..8, 5)) {
        let ctx = idx.get(swaps());
        let m = sparse(ctx.source(), &picks);
        let image = psi(ctx, &m).unwrap();
        prop_assert_eq!(ne(&image), ne(&m));
        prop_assert_eq!(image.col_sums(), m.col_sums());
        prop_assert_eq!(image.row_sums(), swap_with_fillings(ctx, &m).unwrap().row_sums());
        prop_assert_eq!(&psi(&ctx.reverse(), &image).unwrap(), &m);
    }

    #[test]
    fn documents_round_trip(idx in any::<prop::sample::Index>(), bits in any::<u64>()) {
        let shape = idx.get(shapes());
        let f = filling_of(shape, bits);
        let text = emit(&Document::from_filling(f.clone()));
        prop_assert_eq!(parse_grid(&text).unwrap().filling, Some(f.clone()));
        let json = to_json(shape, Some(&f), None);
        prop_assert_eq!(from_json(&json).unwrap().filling, Some(f));
    }
}
