use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use burneq::burnside::{decompose_gset, product_gset, BurnsideError};
use burneq::degree::{deg_polystandard, verify_product, DegreeError, DegreeResult, PolystandardMap};
use burneq::descriptor::{self, DescriptorError};
use burneq::group::{class_leq, weyl_data, DEFAULT_ORDER_CAP};
use burneq::linalg;
use burneq::realization::{realize_element, RealizationError, RealizationTarget};
use burneq::{BurnsideElement, BurnsideRing, FiniteGroup, OrthogonalRepresentation};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "burneq", version, about = "Burnside ring arithmetic and equivariant degrees")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args)]
struct Common {
    /// Group descriptor (JSON).
    #[arg(short = 'g', long = "group")]
    group: PathBuf,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Order, subgroup classes, Weyl orders and the orbit-type poset.
    Group {
        #[command(flatten)]
        common: Common,
        /// Representation descriptors whose orbit types to list.
        #[arg(short = 'r', long = "rep")]
        reps: Vec<PathBuf>,
    },
    /// Table of marks as CSV.
    Marks {
        #[command(flatten)]
        common: Common,
    },
    /// Product of two Burnside elements in text form.
    Mul {
        #[command(flatten)]
        common: Common,
        #[arg(short = 'a', allow_hyphen_values = true)]
        a: String,
        #[arg(short = 'b', allow_hyphen_values = true)]
        b: String,
    },
    /// Equivariant degree of a map (several maps are joined into one).
    Degree {
        #[command(flatten)]
        common: Common,
        #[arg(short = 'r', long = "rep")]
        rep: PathBuf,
        #[arg(short = 'm', long = "map", required = true)]
        maps: Vec<PathBuf>,
    },
    /// Degree of a product map against the product of degrees.
    Product {
        #[command(flatten)]
        common: Common,
        /// Representations of the two factors (`-r1 A -r2 B` or `-r A -r B`).
        #[arg(short = 'r', long = "rep")]
        reps: Vec<PathBuf>,
        #[arg(long = "r1")]
        r1: Option<PathBuf>,
        #[arg(long = "r2")]
        r2: Option<PathBuf>,
        #[arg(short = 'm', long = "map")]
        maps: Vec<PathBuf>,
        #[arg(long = "m1")]
        m1: Option<PathBuf>,
        #[arg(long = "m2")]
        m2: Option<PathBuf>,
    },
    /// Writes a map descriptor whose degree is the given element.
    Realize {
        #[command(flatten)]
        common: Common,
        #[arg(short = 'r', long = "rep")]
        rep: PathBuf,
        #[arg(short = 'e', long = "element", allow_hyphen_values = true)]
        element: String,
        #[arg(short = 'o', long = "out")]
        out: Option<PathBuf>,
    },
    /// Runs the invariant checks on a group and, optionally, representations.
    Check {
        #[command(flatten)]
        common: Common,
        #[arg(short = 'r', long = "rep")]
        reps: Vec<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Random map pairs per representation.
        #[arg(long, default_value_t = 20)]
        trials: usize,
    },
}

enum Failure {
    Input(String),
    Infeasible { reason: &'static str, message: String },
    Internal(String),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Input(_) => 1,
            Failure::Infeasible { .. } => 2,
            Failure::Internal(_) => 3,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Input(m) | Failure::Internal(m) => write!(f, "{m}"),
            Failure::Infeasible { reason, message } => {
                write!(f, "{}", json!({ "error": reason, "message": message }))
            }
        }
    }
}

impl From<DescriptorError> for Failure {
    fn from(e: DescriptorError) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<BurnsideError> for Failure {
    fn from(e: BurnsideError) -> Self {
        match e {
            BurnsideError::NonIntegralSolution { .. } => Failure::Internal(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

impl From<DegreeError> for Failure {
    fn from(e: DegreeError) -> Self {
        match e {
            DegreeError::Burnside(b) => b.into(),
            _ => Failure::Input(e.to_string()),
        }
    }
}

impl From<RealizationError> for Failure {
    fn from(e: RealizationError) -> Self {
        if e.is_infeasible() {
            Failure::Infeasible {
                reason: e.reason_code(),
                message: e.to_string(),
            }
        } else {
            Failure::Input(e.to_string())
        }
    }
}

type Result<T> = std::result::Result<T, Failure>;

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn order_cap() -> Result<usize> {
    match std::env::var("BURNEQ_ORDER_CAP") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Failure::Input(format!("BURNEQ_ORDER_CAP: not a number: {v:?}"))),
        Err(_) => Ok(DEFAULT_ORDER_CAP),
    }
}

fn load_group(path: &Path) -> Result<Arc<FiniteGroup>> {
    let text = read(path)?;
    Ok(Arc::new(descriptor::parse_group_with_cap(&text, order_cap()?)?))
}

fn load_rep(group: &Arc<FiniteGroup>, path: &Path) -> Result<Arc<OrthogonalRepresentation>> {
    let text = read(path)?;
    descriptor::parse_rep(group.clone(), &text)
        .map(Arc::new)
        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load_map(rep: &Arc<OrthogonalRepresentation>, path: &Path) -> Result<PolystandardMap> {
    let text = read(path)?;
    descriptor::parse_map(rep.clone(), &text)
        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn print_json(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("JSON values serialize"));
}

fn element_json(ring: &BurnsideRing, a: &BurnsideElement) -> Value {
    json!({ "text": ring.format(a), "coeffs": a.to_json()["coeffs"] })
}

fn cmd_group(common: &Common, reps: &[PathBuf]) -> Result<()> {
    let group = load_group(&common.group)?;
    let lattice = group.lattice();
    let classes = lattice.classes();
    let weyl: Vec<usize> = classes
        .iter()
        .map(|c| {
            weyl_data(&group, c.representative())
                .map(|w| w.weyl_order)
                .map_err(|e| Failure::Internal(e.to_string()))
        })
        .collect::<Result<_>>()?;
    // covering relations of the class poset
    let covers: Vec<(usize, usize)> = (0..classes.len())
        .flat_map(|a| (0..classes.len()).map(move |b| (a, b)))
        .filter(|&(a, b)| {
            a != b
                && class_leq(&classes[a], &classes[b])
                && !(0..classes.len()).any(|c| {
                    c != a
                        && c != b
                        && class_leq(&classes[a], &classes[c])
                        && class_leq(&classes[c], &classes[b])
                })
        })
        .collect();
    let rep_tables = reps
        .iter()
        .map(|p| Ok((p, load_rep(&group, p)?.orbit_types())))
        .collect::<Result<Vec<_>>>()?;

    if common.format == Format::Json {
        let class_values: Vec<Value> = classes
            .iter()
            .zip(&weyl)
            .map(|(c, w)| {
                json!({
                    "index": c.class_index,
                    "label": c.label,
                    "order": c.order(),
                    "members": c.members.len(),
                    "weyl_order": w,
                })
            })
            .collect();
        let tables: Vec<Value> = rep_tables
            .iter()
            .map(|(path, t)| {
                let entries: Vec<Value> = t
                    .entries
                    .iter()
                    .map(|e| {
                        json!({
                            "label": e.label,
                            "fixed_dim": e.fixed_dim,
                            "occupied": e.occupied,
                            "witness": e.witness.as_ref().map(|w| {
                                w.iter().map(linalg::format_rational).collect::<Vec<_>>()
                            }),
                        })
                    })
                    .collect();
                json!({ "rep": path.display().to_string(), "orbit_types": entries })
            })
            .collect();
        let poset: Vec<Value> = covers
            .iter()
            .map(|&(a, b)| json!([classes[a].label, classes[b].label]))
            .collect();
        print_json(&json!({
            "order": group.order(),
            "classes": class_values,
            "covers": poset,
            "representations": tables,
        }));
        return Ok(());
    }

    println!("order: {}", group.order());
    println!("subgroup classes:");
    for (c, w) in classes.iter().zip(&weyl) {
        println!(
            "  {:>2}  [G/{}]  order {}  conjugates {}  Weyl order {}",
            c.class_index,
            c.label,
            c.order(),
            c.members.len(),
            w
        );
    }
    println!("orbit-type poset (covering relations):");
    for (a, b) in &covers {
        println!("  ({}) < ({})", classes[*a].label, classes[*b].label);
    }
    for (path, t) in rep_tables {
        println!("orbit types of {}:", path.display());
        for e in &t.entries {
            let witness = e
                .witness
                .as_ref()
                .map_or_else(|| "-".to_string(), |w| linalg::format_vector(w));
            println!(
                "  ({})  dim V^H {}  {}  witness {}",
                e.label,
                e.fixed_dim,
                if e.occupied { "occupied" } else { "empty" },
                witness
            );
        }
    }
    Ok(())
}

fn cmd_marks(common: &Common) -> Result<()> {
    let group = load_group(&common.group)?;
    let ring = BurnsideRing::new(group.clone());
    let labels: Vec<String> = group
        .lattice()
        .classes()
        .iter()
        .map(|c| c.label.clone())
        .collect();
    let marks = ring.marks().marks();
    if common.format == Format::Json {
        print_json(&json!({ "labels": labels, "marks": marks }));
        return Ok(());
    }
    let mut w = csv::Writer::from_writer(std::io::stdout());
    let header: Vec<&str> = std::iter::once("").chain(labels.iter().map(String::as_str)).collect();
    let io = |e: csv::Error| Failure::Internal(e.to_string());
    w.write_record(&header).map_err(io)?;
    for (label, row) in labels.iter().zip(marks) {
        let record: Vec<String> = std::iter::once(label.clone())
            .chain(row.iter().map(u64::to_string))
            .collect();
        w.write_record(&record).map_err(io)?;
    }
    w.flush().map_err(|e| Failure::Internal(e.to_string()))
}

fn cmd_mul(common: &Common, a: &str, b: &str) -> Result<()> {
    let group = load_group(&common.group)?;
    let ring = BurnsideRing::new(group);
    let (a, b) = (ring.parse(a)?, ring.parse(b)?);
    let c = ring.mul(&a, &b)?;
    match common.format {
        Format::Text => println!("{}", ring.format(&c)),
        Format::Json => print_json(&element_json(&ring, &c)),
    }
    Ok(())
}

fn degree_json(ring: &BurnsideRing, d: &DegreeResult, map: &PolystandardMap) -> Value {
    let orbits: Vec<Value> = d
        .per_orbit
        .iter()
        .map(|o| {
            json!({
                "piece": o.piece,
                "base_point": map.pieces()[o.piece]
                    .base_point()
                    .iter()
                    .map(linalg::format_rational)
                    .collect::<Vec<_>>(),
                "orbit_size": o.orbit_size,
                "class": o.class_label,
                "index": o.index,
            })
        })
        .collect();
    json!({ "degree": element_json(ring, &d.value), "per_orbit": orbits })
}

fn print_degree_text(ring: &BurnsideRing, d: &DegreeResult) {
    println!("degree: {}", ring.format(&d.value));
    for o in &d.per_orbit {
        println!(
            "  piece {}: orbit {} of size {}, type ({}), index {}",
            o.piece, o.orbit_label, o.orbit_size, o.class_label, o.index
        );
    }
}

fn cmd_degree(common: &Common, rep: &Path, maps: &[PathBuf]) -> Result<()> {
    let group = load_group(&common.group)?;
    let rep = load_rep(&group, rep)?;
    let mut map = PolystandardMap::empty(rep.clone());
    for path in maps {
        map = map.disjoint_union(&load_map(&rep, path)?)?;
    }
    let d = deg_polystandard(&map)?;
    let ring = BurnsideRing::new(group);
    match common.format {
        Format::Text => print_degree_text(&ring, &d),
        Format::Json => print_json(&degree_json(&ring, &d, &map)),
    }
    Ok(())
}

fn pick_two(
    what: &str,
    numbered: (&Option<PathBuf>, &Option<PathBuf>),
    listed: &[PathBuf],
) -> Result<(PathBuf, PathBuf)> {
    let mut all: Vec<PathBuf> = listed.to_vec();
    match numbered {
        (Some(a), Some(b)) if listed.is_empty() => Ok((a.clone(), b.clone())),
        (None, None) if all.len() == 2 => {
            let b = all.pop().expect("two entries");
            Ok((all.pop().expect("two entries"), b))
        }
        (None, None) if all.len() == 1 && what == "rep" => Ok((all[0].clone(), all[0].clone())),
        _ => Err(Failure::Input(format!(
            "product needs exactly two {what} files (-{c}1 A -{c}2 B)",
            c = &what[..1]
        ))),
    }
}

fn cmd_product(
    common: &Common,
    reps: (&Option<PathBuf>, &Option<PathBuf>, &[PathBuf]),
    maps: (&Option<PathBuf>, &Option<PathBuf>, &[PathBuf]),
) -> Result<bool> {
    let (r1, r2) = pick_two("rep", (reps.0, reps.1), reps.2)?;
    let (m1, m2) = pick_two("map", (maps.0, maps.1), maps.2)?;
    let group = load_group(&common.group)?;
    let rep1 = load_rep(&group, &r1)?;
    let rep2 = if r2 == r1 { rep1.clone() } else { load_rep(&group, &r2)? };
    let f = load_map(&rep1, &m1)?;
    let g = load_map(&rep2, &m2)?;
    let ring = BurnsideRing::new(group);
    let report = verify_product(&ring, &f, &g)?;
    let equal = report.all_checks_pass();
    match common.format {
        Format::Json => {
            let orbits: Vec<Value> = report
                .per_orbit
                .iter()
                .map(|o| {
                    json!({
                        "left_piece": o.provenance.left_piece,
                        "right_piece": o.provenance.right_piece,
                        "orbit": o.orbit_label,
                        "class": o.class_label,
                        "d_alpha": o.provenance.d_alpha,
                        "d_beta": o.provenance.d_beta,
                        "d_gamma": o.provenance.d_gamma,
                        "isotropy_is_intersection": o.isotropy_is_intersection,
                        "index_law_holds": o.index_law_holds,
                    })
                })
                .collect();
            print_json(&json!({
                "deg_left": element_json(&ring, &report.deg_left),
                "deg_right": element_json(&ring, &report.deg_right),
                "deg_product": element_json(&ring, &report.lhs),
                "product_of_degrees": element_json(&ring, &report.rhs),
                "equal": equal,
                "per_orbit": orbits,
            }));
        }
        Format::Text => {
            println!("deg f        = {}", ring.format(&report.deg_left));
            println!("deg f'       = {}", ring.format(&report.deg_right));
            println!("deg(f x f')  = {}", ring.format(&report.lhs));
            println!("deg f*deg f' = {}", ring.format(&report.rhs));
            println!("equal: {equal}");
        }
    }
    Ok(equal)
}

fn cmd_realize(common: &Common, rep: &Path, element: &str, out: Option<&Path>) -> Result<()> {
    let group = load_group(&common.group)?;
    let rep_arc = load_rep(&group, rep)?;
    let ring = BurnsideRing::new(group);
    let target = RealizationTarget::new(rep_arc.clone(), ring.parse(element)?)?;
    let map = realize_element(&target)?;
    let rep_id = rep.file_stem().map(|s| s.to_string_lossy().into_owned());
    let d = descriptor::map_descriptor(&map, rep_id);
    let text = serde_json::to_string_pretty(&d).expect("descriptors serialize") + "\n";
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?,
        None => print!("{text}"),
    }
    Ok(())
}

struct CheckLine {
    name: String,
    ok: bool,
    detail: String,
}

fn random_target(
    rep: &OrthogonalRepresentation,
    rng: &mut ChaCha8Rng,
) -> BurnsideElement {
    let coeffs: Vec<i64> = rep
        .orbit_types()
        .entries
        .iter()
        .map(|e| match (e.occupied, e.fixed_dim) {
            (false, _) => 0,
            (true, 0) => rng.gen_range(0..=1),
            _ => rng.gen_range(-2..=2),
        })
        .collect();
    BurnsideElement::from_i64(rep.group(), &coeffs).expect("one coefficient per class")
}

fn cmd_check(common: &Common, reps: &[PathBuf], seed: u64, trials: usize) -> Result<bool> {
    let group = load_group(&common.group)?;
    let ring = BurnsideRing::new(group.clone());
    let n = group.lattice().class_count();
    let mut lines = Vec::new();

    let mut mismatches = 0;
    for h in 0..n {
        for k in 0..n {
            let by_marks = ring.mul(&ring.basis(h), &ring.basis(k))?;
            if by_marks != decompose_gset(&group, &product_gset(&group, h, k))? {
                mismatches += 1;
            }
        }
    }
    lines.push(CheckLine {
        name: "marks vs orbit oracle".into(),
        ok: mismatches == 0,
        detail: format!("{} class pairs, {mismatches} mismatches", n * n),
    });

    let one = ring.one();
    let mut bad = 0;
    for i in 0..n {
        let a = ring.basis(i);
        if ring.mul(&a, &one)? != a {
            bad += 1;
        }
        for j in 0..n {
            let b = ring.basis(j);
            if ring.mul(&a, &b)? != ring.mul(&b, &a)? {
                bad += 1;
            }
        }
    }
    lines.push(CheckLine {
        name: "unit and commutativity".into(),
        ok: bad == 0,
        detail: format!("{bad} violations"),
    });

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for path in reps {
        let rep = load_rep(&group, path)?;
        let mut round_trip_failures = 0;
        let mut product_failures = 0;
        for _ in 0..trials {
            let s = random_target(&rep, &mut rng);
            let t = random_target(&rep, &mut rng);
            let f = realize_element(&RealizationTarget::new(rep.clone(), s.clone())?)?;
            let g = realize_element(&RealizationTarget::new(rep.clone(), t.clone())?)?;
            if deg_polystandard(&f)?.value != s || deg_polystandard(&g)?.value != t {
                round_trip_failures += 1;
            }
            let report = verify_product(&ring, &f, &g)?;
            if !report.all_checks_pass() || report.lhs != ring.mul(&s, &t)? {
                product_failures += 1;
            }
        }
        lines.push(CheckLine {
            name: format!("realization round trip ({})", path.display()),
            ok: round_trip_failures == 0,
            detail: format!("{trials} pairs, {round_trip_failures} failures"),
        });
        lines.push(CheckLine {
            name: format!("product formula ({})", path.display()),
            ok: product_failures == 0,
            detail: format!("{trials} pairs, {product_failures} failures"),
        });
    }

    let all_ok = lines.iter().all(|l| l.ok);
    match common.format {
        Format::Json => {
            let checks: Vec<Value> = lines
                .iter()
                .map(|l| json!({ "check": l.name, "ok": l.ok, "detail": l.detail }))
                .collect();
            print_json(&json!({ "seed": seed, "checks": checks, "ok": all_ok }));
        }
        Format::Text => {
            for l in &lines {
                println!("{}: {} ({})", l.name, if l.ok { "ok" } else { "FAILED" }, l.detail);
            }
        }
    }
    Ok(all_ok)
}

fn run(cli: Cli) -> Result<()> {
    let ok = match &cli.command {
        Command::Group { common, reps } => cmd_group(common, reps).map(|_| true),
        Command::Marks { common } => cmd_marks(common).map(|_| true),
        Command::Mul { common, a, b } => cmd_mul(common, a, b).map(|_| true),
        Command::Degree { common, rep, maps } => cmd_degree(common, rep, maps).map(|_| true),
        Command::Product {
            common,
            reps,
            r1,
            r2,
            maps,
            m1,
            m2,
        } => cmd_product(common, (r1, r2, reps), (m1, m2, maps)),
        Command::Realize {
            common,
            rep,
            element,
            out,
        } => cmd_realize(common, rep, element, out.as_deref()).map(|_| true),
        Command::Check {
            common,
            reps,
            seed,
            trials,
        } => cmd_check(common, reps, *seed, *trials),
    }?;
    if ok {
        Ok(())
    } else {
        Err(Failure::Internal("verification failed".into()))
    }
}

/// `-r1 x` is shorthand for `--r1 x` (likewise `-r2`, `-m1`, `-m2`).
fn normalize_args(args: impl Iterator<Item = String>) -> Vec<String> {
    args.map(|a| match a.as_str() {
        "-r1" | "-r2" | "-m1" | "-m2" => format!("-{a}"),
        _ => a,
    })
    .collect()
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse_from(normalize_args(std::env::args())) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{}", match &f {
                Failure::Infeasible { .. } => f.to_string(),
                _ => format!("error: {f}"),
            });
            ExitCode::from(f.exit_code())
        }
    }
}
