use std::collections::HashSet;

use dualgame::fuzz::{planted, random_term};
use dualgame::game::{verdict, DEFAULT_BUDGET};
use dualgame::oracle;
use dualgame::solver::{enumerate_terms, SearchConfig};
use dualgame::term::Term;
use dualgame::tree::TermTree;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn sample(seed: u64, order: usize) -> (dualgame::problem::Problem, Term, Vec<Term>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (p, t) = planted(&mut rng, order);
    let alpha = p.alphabet();
    let args = p.x.ty().args.iter().map(|a| random_term(&mut rng, a, &alpha, 3)).collect();
    (p, t, args)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn normal_forms_do_not_depend_on_strategy(seed in any::<u64>(), order in 2usize..=5) {
        let (_, t, args) = sample(seed, order);
        let redex = Term::app(t, args);
        let a = redex.normalize();
        let b = redex.normalize_applicative();
        prop_assert!(a.alpha_eq(&b), "{} vs {}", a, b);
        prop_assert!(a.is_normal());
    }

    #[test]
    fn eta_expansion_is_idempotent(seed in any::<u64>(), order in 2usize..=5) {
        let (_, t, args) = sample(seed, order);
        let nf = Term::app(t, args).normalize().eta_long();
        prop_assert!(nf.is_eta_long());
        prop_assert!(nf.eta_long().alpha_eq(&nf));
    }

    #[test]
    fn printing_then_parsing_gives_the_same_term(seed in any::<u64>(), order in 2usize..=5) {
        let (p, t, _) = sample(seed, order);
        let back = p.parse_term(&t.to_source()).unwrap();
        prop_assert!(back.alpha_eq(&t));
        let again = dualgame::problem::Problem::parse(&p.to_source()).unwrap();
        prop_assert_eq!(again.to_source(), p.to_source());
    }

    #[test]
    fn generated_terms_have_the_unknown_type(seed in any::<u64>(), order in 2usize..=5) {
        let (p, t, _) = sample(seed, order);
        prop_assert_eq!(&t.type_of().unwrap(), p.x.ty());
        prop_assert!(t.free_vars().is_empty());
    }

    #[test]
    fn game_and_oracle_agree_on_random_candidates(seed in any::<u64>(), order in 2usize..=4) {
        let (p, _, _) = sample(seed, order);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let t = random_term(&mut rng, p.x.ty(), &p.alphabet(), 3);
        let want = oracle::solves(&t, &p).unwrap().overall;
        let got = verdict(&TermTree::from_term(&t), &p, DEFAULT_BUDGET).unwrap();
        prop_assert_eq!(got, want);
    }
}

#[test]
fn enumeration_has_no_duplicates() {
    for seed in 0..6 {
        let (p, _, _) = sample(seed, 3);
        let alpha = p.alphabet();
        let cfg = SearchConfig { max_total_tiles: 2, max_depth_tiles: 2, max_terms: 5000, ..Default::default() };
        let ty = p.x.ty().clone();
        let terms: Vec<Term> = enumerate_terms(&ty, &alpha, &cfg).collect();
        let keys: HashSet<_> = terms.iter().map(|t| t.key()).collect();
        assert_eq!(keys.len(), terms.len());
        for t in &terms {
            assert!(t.is_eta_long());
            assert_eq!(&t.type_of().unwrap(), &ty);
        }
    }
}
