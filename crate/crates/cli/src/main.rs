//! `provar`: command-line front end. Every command prints one JSON object on
//! stdout. Exit status 2 means invalid input, 3 means a cap or search budget
//! was hit.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use serde_json::{json, Value};

use provar_core::apd::{self, ClosureAlgorithm, FreeObject, GpdGroup, DEFAULT_APD_CAP};
use provar_core::bs::{self, BsElement, DEFAULT_BS_SEARCH_CAP};
use provar_core::finitegroup::{named, CayleyJson, GroupJson, PermGroup, DEFAULT_GROUP_CAP};
use provar_core::fplinalg::{self, ApdPresentation, MatrixFp};
use provar_core::metabelian::{self, DEFAULT_WITNESS_PRIME_LIMIT};
use provar_core::numtheory::{self, Prime, DEFAULT_PR_SEARCH_CAP};
use provar_core::stallings::{AutomatonJson, Index};
use provar_core::uvar;
use provar_core::{Automaton, Error, Word};

#[derive(Parser)]
#[command(name = "provar", version, about = "Pro-V closures, the pseudovariety U and separating homomorphisms")]
struct Cli {
    /// Overrides the enumeration cap of the command.
    #[arg(long, global = true)]
    cap: Option<usize>,
    /// Writes a Graphviz rendering of the resulting automaton or Cayley graph.
    #[arg(long, global = true, value_name = "FILE")]
    dot: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

/// A subgroup of `F_n`, by generators, automaton JSON or permutation action.
#[derive(Args, Clone)]
struct Subgroup {
    /// Rank of the ambient free group; inferred from the words if omitted.
    #[arg(long)]
    rank: Option<usize>,
    /// Comma-separated generator words, e.g. "ab,a^-2 b".
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    gens: Vec<String>,
    /// Automaton JSON, inline or `@file`.
    #[arg(long, conflicts_with_all = ["gens", "action"])]
    automaton: Option<String>,
    /// Group JSON; the subgroup is the stabilizer of point 1 under the
    /// action of the generators.
    #[arg(long, conflicts_with = "gens")]
    action: Option<String>,
}

/// A finite group, by permutation generators, Cayley table or name.
#[derive(Args, Clone)]
struct GroupInput {
    /// `{"degree": n, "generators": [[...], ...]}` with 1-based images.
    #[arg(long)]
    group: Option<String>,
    /// `{"order": n, "table": [[...], ...]}` with 0-based entries.
    #[arg(long, conflicts_with = "group")]
    cayley: Option<String>,
    /// S4, A4, D4, Q8, C12, ...
    #[arg(long, conflicts_with_all = ["group", "cayley"])]
    name: Option<String>,
}

#[derive(Copy, Clone, ValueEnum)]
enum Algorithm {
    Cosets,
    Cayley,
}

#[derive(Subcommand)]
enum Command {
    /// Stallings automaton, index and basis of a subgroup.
    Stallings(Subgroup),
    /// Index and free basis.
    Index(Subgroup),
    /// Join of two subgroups.
    Join {
        #[command(flatten)]
        sub: Subgroup,
        /// Generators of the second subgroup.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        other: Vec<String>,
    },
    /// Intersection of two subgroups.
    Intersect {
        #[command(flatten)]
        sub: Subgroup,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        other: Vec<String>,
    },
    /// Closure in the pro-Ab(p)*Ab(d) topology.
    Closure {
        #[command(flatten)]
        sub: Subgroup,
        #[arg(long)]
        p: u64,
        /// Defaults to p - 1.
        #[arg(long)]
        d: Option<u64>,
        #[arg(long, value_enum, default_value = "cosets")]
        algorithm: Algorithm,
    },
    /// Closedness and density for each listed prime (d defaults to p - 1).
    Status {
        #[command(flatten)]
        sub: Subgroup,
        #[arg(long, value_delimiter = ',', required = true)]
        p: Vec<u64>,
        #[arg(long)]
        d: Option<u64>,
    },
    /// Whether a finite-index subgroup is U-closed.
    IsUClosed(Subgroup),
    /// Exact U-closure of a finite-index subgroup.
    ClU(Subgroup),
    /// Intersection of the U_p-closures over the listed primes.
    ClUApprox {
        #[command(flatten)]
        sub: Subgroup,
        #[arg(long, value_delimiter = ',', required = true)]
        primes: Vec<u64>,
    },
    /// A generator index certifying that the U-closure is not finitely generated.
    NotFgCert(Subgroup),
    /// Density in U_p for all primes up to the bound.
    UDensity {
        #[command(flatten)]
        sub: Subgroup,
        #[arg(long)]
        bound: u64,
    },
    /// Membership of a finite group in U.
    IsInU(GroupInput),
    Supersolvable(GroupInput),
    /// The group G_{p,d}, optionally evaluating a word at a -> x, b -> y.
    Gpd {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        d: u64,
        #[arg(long)]
        q: Option<u64>,
        #[arg(long, allow_hyphen_values = true)]
        word: Option<String>,
    },
    /// Exponents (m, k) realizing G_{p,d}^(q) = G_{p,d}^(r).
    GpdIso {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        d: u64,
        #[arg(long)]
        q: u64,
        #[arg(long)]
        r: u64,
    },
    /// The free object F_n(p,d), optionally evaluating a word in it.
    FreeObject {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        d: u64,
        #[arg(long, allow_hyphen_values = true)]
        word: Option<String>,
    },
    /// Diagonalizes one matrix, or several commuting ones simultaneously.
    Diagonalize {
        #[arg(long)]
        p: u64,
        /// Row lists, e.g. "[[1,2],[0,3]]"; repeat for simultaneous mode.
        #[arg(long, required = true)]
        matrix: Vec<String>,
    },
    ActionToPresentation {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        d: u64,
        #[arg(long, required = true)]
        matrix: Vec<String>,
        /// Order d_j of each matrix.
        #[arg(long, value_delimiter = ',', required = true)]
        orders: Vec<u64>,
    },
    /// Embedding of a presented group into copies of G_{p,d} and C_d.
    Decompose {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        d: u64,
        #[arg(long, value_delimiter = ',', required = true)]
        orders: Vec<u64>,
        /// The n x m table q_ij as JSON.
        #[arg(long)]
        q: String,
    },
    /// Equality in the free metabelian group of rank 2.
    MetabEqual {
        #[arg(long, allow_hyphen_values = true)]
        u: String,
        #[arg(long, allow_hyphen_values = true)]
        v: String,
    },
    /// A homomorphism to some G_p under which the word survives.
    MetabWitness {
        #[arg(long, allow_hyphen_values = true)]
        word: String,
        #[arg(long, default_value_t = DEFAULT_WITNESS_PRIME_LIMIT)]
        prime_limit: u64,
    },
    /// Normal form of a word in BS(1,q).
    BsEval {
        #[arg(long, allow_hyphen_values = true)]
        word: String,
        #[arg(long)]
        q: u64,
    },
    /// A prime p and a map BS(1,q) -> G_p keeping the element nontrivial.
    BsWitness {
        #[arg(long, allow_hyphen_values = true)]
        word: String,
        #[arg(long)]
        q: u64,
    },
    QSets {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        d: u64,
    },
    /// Smallest prime p >= lower with q a primitive root mod p.
    FindPrPrime {
        #[arg(long)]
        q: String,
        #[arg(long)]
        lower: String,
    },
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Core(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

type Out = Result<Value, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn read_payload(text: &str) -> Result<String, CliError> {
    match text.strip_prefix('@') {
        Some(path) => fs::read_to_string(path).map_err(|e| usage(format!("cannot read {path}: {e}"))),
        None => Ok(text.to_string()),
    }
}

fn parse_json<T: serde::de::DeserializeOwned>(text: &str, what: &str) -> Result<T, CliError> {
    serde_json::from_str(&read_payload(text)?).map_err(|e| usage(format!("bad {what} JSON: {e}")))
}

fn parse_words(texts: &[String], rank: Option<usize>) -> Result<(Vec<Word>, usize), CliError> {
    let texts: Vec<&str> = texts.iter().map(|s| s.trim()).filter(|s| !s.is_empty()).collect();
    let rank = match rank {
        Some(r) => r,
        None => texts.iter().map(|t| Word::parse_auto(t, 1).map(|w| w.rank())).collect::<Result<Vec<_>, _>>()?.into_iter().max().unwrap_or(1),
    };
    let words = texts.iter().map(|t| Word::parse(t, rank)).collect::<Result<Vec<_>, _>>()?;
    Ok((words, rank))
}

fn word2(text: &str) -> Result<Word, CliError> {
    Ok(Word::parse(text, 2)?)
}

fn subgroup(s: &Subgroup) -> Result<Automaton, CliError> {
    let aut = if let Some(text) = &s.automaton {
        Automaton::from_json(&parse_json::<AutomatonJson>(text, "automaton")?)?
    } else if let Some(text) = &s.action {
        let g = parse_json::<GroupJson>(text, "group")?.to_group()?;
        let perms: Vec<Vec<usize>> = g.generators().iter().map(|p| p.images()).collect();
        Automaton::from_action(&perms, 0)?
    } else {
        let (words, rank) = parse_words(&s.gens, s.rank)?;
        Automaton::build(&words, rank)?
    };
    if let Some(r) = s.rank {
        if r != aut.rank() {
            return Err(Error::RankMismatch { left: r, right: aut.rank() }.into());
        }
    }
    Ok(aut)
}

fn group(g: &GroupInput, cap: usize) -> Result<PermGroup, CliError> {
    let grp = match (&g.group, &g.cayley, &g.name) {
        (Some(t), _, _) => parse_json::<GroupJson>(t, "group")?.to_group()?,
        (_, Some(t), _) => parse_json::<CayleyJson>(t, "Cayley table")?.to_group()?,
        (_, _, Some(n)) => named::by_name(n)?,
        _ => return Err(usage("one of --group, --cayley, --name is required")),
    };
    Ok(grp.with_cap(cap))
}

fn matrix(p: u64, text: &str) -> Result<MatrixFp, CliError> {
    Ok(MatrixFp::new(p, parse_json(text, "matrix")?)?)
}

fn index_json(i: Index) -> Value {
    match i {
        Index::Finite(k) => json!(k),
        Index::Infinite => json!("infinite"),
    }
}

fn big_json(x: &BigUint) -> Value {
    match u64::try_from(x) {
        Ok(v) => json!(v),
        Err(_) => json!(x.to_string()),
    }
}

fn describe(aut: &Automaton) -> Value {
    let (index, basis) = aut.index_and_basis();
    json!({
        "rank": aut.rank(),
        "vertices": aut.num_vertices(),
        "index": index_json(index),
        "basis": basis.iter().map(|w| w.to_string()).collect::<Vec<_>>(),
        "automaton": aut.to_json(),
    })
}

struct Ctx {
    cap: Option<usize>,
    dot: Option<String>,
}

impl Ctx {
    fn cap(&self, default: usize) -> usize {
        self.cap.unwrap_or(default)
    }

    fn automaton(&mut self, aut: &Automaton) -> Value {
        self.dot = Some(aut.to_dot());
        describe(aut)
    }
}

fn run(cmd: Command, ctx: &mut Ctx) -> Out {
    match cmd {
        Command::Stallings(s) => {
            let aut = subgroup(&s)?;
            Ok(ctx.automaton(&aut))
        }
        Command::Index(s) => {
            let (index, basis) = subgroup(&s)?.index_and_basis();
            Ok(json!({ "index": index_json(index), "basis": basis.iter().map(|w| w.to_string()).collect::<Vec<_>>() }))
        }
        Command::Join { sub, other } => {
            let h = subgroup(&sub)?;
            let (words, _) = parse_words(&other, Some(h.rank()))?;
            let aut = h.join(&Automaton::build(&words, h.rank())?)?;
            Ok(ctx.automaton(&aut))
        }
        Command::Intersect { sub, other } => {
            let h = subgroup(&sub)?;
            let (words, _) = parse_words(&other, Some(h.rank()))?;
            let aut = h.intersect(&Automaton::build(&words, h.rank())?)?;
            Ok(ctx.automaton(&aut))
        }
        Command::Closure { sub, p, d, algorithm } => {
            let h = subgroup(&sub)?;
            let d = d.unwrap_or(p.saturating_sub(1));
            let alg = match algorithm {
                Algorithm::Cosets => ClosureAlgorithm::Cosets,
                Algorithm::Cayley => ClosureAlgorithm::Cayley,
            };
            let aut = apd::closure_apd_with(&h, p, d, ctx.cap(DEFAULT_APD_CAP), alg)?;
            let mut out = ctx.automaton(&aut);
            out["p"] = json!(p);
            out["d"] = json!(d);
            Ok(out)
        }
        Command::Status { sub, p, d } => {
            let h = subgroup(&sub)?;
            let mut results = Vec::new();
            for &p in &p {
                let d = d.unwrap_or(p.saturating_sub(1));
                let st = apd::status_apd(&h, p, d)?;
                results.push(json!({
                    "p": p,
                    "d": d,
                    "closed": st.closed,
                    "dense": st.dense,
                    "index_of_closure": big_json(&st.index_of_closure),
                }));
            }
            Ok(json!({ "results": results }))
        }
        Command::IsUClosed(s) => {
            let h = subgroup(&s)?;
            let closed = uvar::is_u_closed(&h, ctx.cap(DEFAULT_GROUP_CAP))?;
            Ok(json!({ "u_closed": closed, "index": index_json(h.index()) }))
        }
        Command::ClU(s) => {
            let h = subgroup(&s)?;
            if !h.is_complete() {
                return Err(Error::NotFiniteIndex.into());
            }
            let aut = uvar::cl_u_finite_index(&h, ctx.cap(DEFAULT_GROUP_CAP))?;
            let mut out = ctx.automaton(&aut);
            out["strictly_contains_input"] = json!(aut != h);
            Ok(out)
        }
        Command::ClUApprox { sub, primes } => {
            let h = subgroup(&sub)?;
            let ap = uvar::cl_u_approx(&h, &primes, ctx.cap(DEFAULT_APD_CAP))?;
            let mut out = ctx.automaton(&ap.automaton);
            out["primes"] = json!(ap.primes);
            out["exact"] = json!(ap.exact);
            Ok(out)
        }
        Command::NotFgCert(s) => Ok(json!({ "certificate": uvar::not_fg_certificate(&subgroup(&s)?) })),
        Command::UDensity { sub, bound } => {
            let r = uvar::u_density_check(&subgroup(&sub)?, bound)?;
            Ok(serde_json::to_value(r).expect("serializable"))
        }
        Command::IsInU(g) => {
            let r = uvar::is_in_u(&group(&g, ctx.cap(DEFAULT_GROUP_CAP))?)?;
            Ok(serde_json::to_value(r).expect("serializable"))
        }
        Command::Supersolvable(g) => {
            let grp = group(&g, ctx.cap(DEFAULT_GROUP_CAP))?;
            Ok(json!({ "order": grp.order()?, "supersolvable": grp.is_supersolvable()? }))
        }
        Command::Gpd { p, d, q, word } => {
            let g = GpdGroup::new(p, d, q)?;
            let mut out = json!({ "p": p, "d": d, "q": g.q(), "order": g.order(), "abelian": g.q() == 1 });
            if let Some(text) = word {
                let img = g.eval_word(&word2(&text)?, &[g.x(), g.y()])?;
                out["image"] = json!(img.to_string());
            }
            Ok(out)
        }
        Command::GpdIso { p, d, q, r } => {
            let iso = apd::gpd_iso(p, d, q, r)?;
            Ok(json!({ "m": iso.m, "k": iso.k }))
        }
        Command::FreeObject { n, p, d, word } => {
            let fo = FreeObject::new(n, p, d)?;
            let mut out = json!({
                "n": n,
                "p": p,
                "d": d,
                "q": fo.q(),
                "order": big_json(&fo.order()),
                "formula_order": big_json(&fo.formula_order()),
            });
            if let Some(text) = word {
                let w = Word::parse(&text, n)?;
                let e = fo.eval(&w)?;
                out["tau"] = json!(e.tau());
                out["is_identity"] = json!(e.is_identity());
            }
            if ctx.dot.is_some() {
                ctx.dot = Some(fo.cayley_automaton(ctx.cap(DEFAULT_APD_CAP))?.to_dot());
            }
            Ok(out)
        }
        Command::Diagonalize { p, matrix: texts } => {
            let ms = texts.iter().map(|t| matrix(p, t)).collect::<Result<Vec<_>, _>>()?;
            if ms.len() == 1 {
                Ok(serde_json::to_value(fplinalg::diagonalize(&ms[0])?).expect("serializable"))
            } else {
                Ok(serde_json::to_value(fplinalg::simultaneous_diagonalize(&ms)?).expect("serializable"))
            }
        }
        Command::ActionToPresentation { p, d, matrix: texts, orders } => {
            let ms = texts.iter().map(|t| matrix(p, t)).collect::<Result<Vec<_>, _>>()?;
            let pres = fplinalg::action_to_presentation(&ms, &orders, p, d)?;
            Ok(serde_json::to_value(pres).expect("serializable"))
        }
        Command::Decompose { p, d, orders, q } => {
            let pres = ApdPresentation::new(p, d, orders, parse_json(&q, "q table")?)?;
            let dec = apd::decompose_apd(&pres, ctx.cap(DEFAULT_APD_CAP))?;
            let mut out = serde_json::to_value(&dec).expect("serializable");
            out["injective"] = json!(dec.is_injective());
            Ok(out)
        }
        Command::MetabEqual { u, v } => Ok(json!({ "equal": metabelian::metab_equal(&word2(&u)?, &word2(&v)?)? })),
        Command::MetabWitness { word, prime_limit } => {
            let u = word2(&word)?;
            let w = metabelian::separating_witness(&u, prime_limit)?;
            Ok(json!({
                "p": big_json(&w.p),
                "q": big_json(&w.q),
                "route": w.route.to_string(),
                "image": w.image_string(),
                "image_x": big_json(&w.image_x),
                "image_y": big_json(&w.image_y),
                "verified": w.verify(&u)?,
            }))
        }
        Command::BsEval { word, q } => {
            let g = bs::bs_eval(&word2(&word)?, q)?;
            Ok(bs_json(&g))
        }
        Command::BsWitness { word, q } => {
            let u = word2(&word)?;
            let g = bs::bs_eval(&u, q)?;
            let w = bs::bs_separating_prime(&g, ctx.cap.map_or(DEFAULT_BS_SEARCH_CAP, |c| c as u64))?;
            Ok(json!({
                "element": bs_json(&g),
                "p": w.p,
                "image": w.image.to_string(),
                "verified": w.verify_word(&u)?,
            }))
        }
        Command::QSets { p, d } => {
            let (qs, qp) = numtheory::q_sets(p, d)?;
            Ok(json!({ "q": qs, "q_prime": qp }))
        }
        Command::FindPrPrime { q, lower } => {
            let parse = |s: &str| s.trim().parse::<BigUint>().map_err(|e| usage(format!("bad integer {s:?}: {e}")));
            let q = Prime::new(parse(&q)?)?;
            let r = numtheory::find_pr_prime(&q, &parse(&lower)?, ctx.cap.map_or(DEFAULT_PR_SEARCH_CAP, |c| c as u64))?;
            Ok(json!({ "q": big_json(r.q.value()), "p": big_json(r.p.value()), "order_check": big_json(&r.order_check) }))
        }
    }
}

fn bs_json(g: &BsElement) -> Value {
    json!({
        "q": g.q(),
        "m": g.numerator().to_string(),
        "s": g.denominator_exponent(),
        "j": g.j(),
        "element": g.to_string(),
        "trivial": g.is_identity(),
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    let dot_path = cli.dot.clone();
    let mut ctx = Ctx { cap: cli.cap, dot: dot_path.as_ref().map(|_| String::new()) };
    match run(cli.command, &mut ctx) {
        Ok(value) => {
            if let (Some(path), Some(dot)) = (dot_path, ctx.dot.filter(|d| !d.is_empty())) {
                if let Err(e) = fs::write(&path, dot) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return ExitCode::from(2);
                }
            }
            println!("{value}");
            ExitCode::SUCCESS
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_resource_limit() { 3 } else { 2 })
        }
    }
}
