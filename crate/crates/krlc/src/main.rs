mod artifact;
mod error;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use krl_core::algebra::{
    characteristic_semigroup, is_flip_flop_semiautomaton, is_prime_operator, is_prime_semiautomaton, is_simple_group,
    operators_similar, semiautomata_isomorphic, Limits,
};
use krl_core::automata::{Alphabet, InputFunction, Semiautomaton};
use krl_core::compile::{
    automaton_to_program, cascade_to_program, formula_to_normal_program, pltl_to_program, program_to_cascade,
    unfold_program,
};
use krl_core::equiv::{bounded_equiv_with_budget, bounded_nonexpressibility, Verdict, DEFAULT_BUDGET};
use krl_core::operators::{CounterConvention, Factorization, OperatorRegistry};
use krl_core::pltl::{series, SinceSemantics};
use krl_core::programs::{eval_program, is_normal, is_treelike, simulate, ParseOptions};
use krl_core::trace::{Trace, Variable};
use serde_json::{json, Value};

use artifact::{load, load_program, parse_any_trace, trace_names, trace_text, universe, Artifact, Kind};
use error::CliError;

const SCHEMA_VERSION: u32 = 1;

#[derive(Parser)]
#[command(name = "krlc", version, about = "Past LTL, Krohn-Rhodes programs and automata cascades")]
struct Cli {
    /// Print a JSON object instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Reading of the C<n> increment: literal or intent.
    #[arg(long, global = true, default_value = "literal")]
    counter_convention: CounterConvention,
    /// Accept `$` in variable names, as printed for generated variables.
    #[arg(long, global = true)]
    allow_generated: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a formula on a trace.
    Eval(EvalArgs),
    /// Evaluate a query over a program's variables on a trace.
    EvalProgram(EvalProgramArgs),
    /// Run an automaton on a word.
    Run(RunArgs),
    /// Run a cascade on a word.
    RunCascade(RunArgs),
    /// Translate between formulas, programs, automata and cascades.
    Compile(CompileArgs),
    /// Unfold a program variable into a formula.
    Unfold(UnfoldArgs),
    /// Build a normal program for a formula, or classify a program.
    Normalize(NormalizeArgs),
    /// Semigroup and primality facts about an automaton or operator.
    Algebra(AlgebraArgs),
    /// Compare two recognizers on every trace up to a length.
    Equiv(EquivArgs),
    /// List the built-in operators.
    Operators(OperatorsArgs),
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    formula: String,
    /// `{a};{};{a,b}`, JSON, or a file holding either.
    #[arg(long)]
    trace: String,
    /// Universe of the trace; defaults to the names that occur.
    #[arg(long)]
    vars: Option<String>,
    /// Instant to evaluate at; defaults to the last step.
    #[arg(long)]
    at: Option<usize>,
}

#[derive(Args)]
struct EvalProgramArgs {
    #[arg(long)]
    program: String,
    #[arg(long)]
    trace: String,
    /// A formula over the program's variables.
    #[arg(long)]
    query: String,
    #[arg(long)]
    vars: Option<String>,
    /// Instant, 0 for the virtual initial instant; defaults to the last step.
    #[arg(long)]
    at: Option<usize>,
}

#[derive(Args)]
struct RunArgs {
    /// JSON automaton or cascade.
    path: String,
    /// Comma-separated letter names.
    #[arg(long, conflicts_with = "trace")]
    word: Option<String>,
    /// A trace, for bit alphabets.
    #[arg(long)]
    trace: Option<String>,
}

#[derive(Args)]
struct CompileArgs {
    artifact: String,
    #[arg(long)]
    kind: Option<Kind>,
    /// Target: program or cascade. Formulas and automata default to program,
    /// programs to cascade, cascades to program.
    #[arg(long)]
    to: Option<String>,
}

#[derive(Args)]
struct UnfoldArgs {
    /// `file.krl:var`
    program: String,
    #[arg(long)]
    var: Option<String>,
}

#[derive(Args)]
struct NormalizeArgs {
    artifact: String,
    #[arg(long)]
    kind: Option<Kind>,
}

#[derive(Args)]
struct AlgebraArgs {
    #[arg(long, conflicts_with = "operator")]
    automaton: Option<String>,
    /// A built-in operator name such as S or C3.
    #[arg(long)]
    operator: Option<String>,
    /// Another automaton (isomorphism) or operator (similarity).
    #[arg(long)]
    similar: Option<String>,
}

#[derive(Args)]
struct EquivArgs {
    #[arg(long)]
    left: String,
    /// Omit together with --search to look for a formula instead.
    #[arg(long, required_unless_present = "search")]
    right: Option<String>,
    #[arg(long)]
    maxlen: usize,
    #[arg(long)]
    vars: Option<String>,
    #[arg(long)]
    left_kind: Option<Kind>,
    #[arg(long)]
    right_kind: Option<Kind>,
    /// Search formulas up to this size for one matching --left.
    #[arg(long)]
    search: Option<usize>,
    /// Enumeration cap; overrides KRLC_BUDGET.
    #[arg(long)]
    budget: Option<u64>,
}

#[derive(Args)]
struct OperatorsArgs {
    /// Show one operator's transition table.
    #[arg(long)]
    name: Option<String>,
}

struct Outcome {
    code: u8,
    text: String,
    json: Value,
}

impl Outcome {
    fn ok(text: String, json: Value) -> Self {
        Outcome { code: 0, text, json }
    }
}

struct Ctx {
    opts: ParseOptions,
    limits: Limits,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let ctx = Ctx {
        opts: ParseOptions {
            allow_generated: cli.allow_generated,
            registry: OperatorRegistry::with_convention(cli.counter_convention),
        },
        limits: Limits::default(),
    };
    let name = command_name(&cli.command);
    match dispatch(&ctx, cli.command) {
        Ok(out) => {
            if cli.json {
                let mut v = json!({ "schema_version": SCHEMA_VERSION, "command": name });
                if let (Some(obj), Value::Object(extra)) = (v.as_object_mut(), out.json) {
                    obj.extend(extra);
                }
                println!("{v}");
            } else {
                print!("{}", out.text);
            }
            ExitCode::from(out.code)
        }
        Err(e) => {
            if cli.json {
                let v = json!({
                    "schema_version": SCHEMA_VERSION,
                    "command": name,
                    "error": { "code": e.code, "message": e.message },
                });
                println!("{v}");
            }
            eprintln!("{e}");
            ExitCode::from(2)
        }
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Eval(_) => "eval",
        Command::EvalProgram(_) => "eval-program",
        Command::Run(_) => "run",
        Command::RunCascade(_) => "run-cascade",
        Command::Compile(_) => "compile",
        Command::Unfold(_) => "unfold",
        Command::Normalize(_) => "normalize",
        Command::Algebra(_) => "algebra",
        Command::Equiv(_) => "equiv",
        Command::Operators(_) => "operators",
    }
}

fn dispatch(ctx: &Ctx, command: Command) -> Result<Outcome, CliError> {
    match command {
        Command::Eval(a) => eval(ctx, a),
        Command::EvalProgram(a) => eval_prog(ctx, a),
        Command::Run(a) => run(a, false),
        Command::RunCascade(a) => run(a, true),
        Command::Compile(a) => compile(ctx, a),
        Command::Unfold(a) => unfold(ctx, a),
        Command::Normalize(a) => normalize(ctx, a),
        Command::Algebra(a) => algebra(ctx, a),
        Command::Equiv(a) => equiv(ctx, a),
        Command::Operators(a) => operators(ctx, a),
    }
}

fn instant(at: Option<usize>, trace: &Trace, allow_zero: bool) -> Result<usize, CliError> {
    let t = at.unwrap_or(trace.len());
    if t > trace.len() || (t == 0 && !allow_zero) {
        return Err(CliError::new(
            error::TIME,
            format!("instant {t} is outside 1..={}", trace.len()),
        ));
    }
    Ok(t)
}

fn eval(ctx: &Ctx, a: EvalArgs) -> Result<Outcome, CliError> {
    let f = krl_core::pltl::parse_formula_with(&a.formula, ctx.opts.allow_generated)?;
    let text = trace_text(&a.trace)?;
    let u = universe(a.vars.as_deref(), f.vars().into_iter().chain(trace_names(&text)))?;
    let trace = parse_any_trace(&text, &u)?;
    let t = instant(a.at, &trace, false)?;
    let s = series(&f, &trace, trace.len(), SinceSemantics::Direct);
    let value = s[t - 1];
    Ok(Outcome::ok(
        format!("{value}\n"),
        json!({ "formula": f.to_string(), "trace": trace.to_json(), "t": t, "value": value, "series": s }),
    ))
}

fn eval_prog(ctx: &Ctx, a: EvalProgramArgs) -> Result<Outcome, CliError> {
    let p = load_program(&a.program, &ctx.opts)?;
    let q = krl_core::pltl::parse_formula_with(&a.query, true)?;
    let text = trace_text(&a.trace)?;
    let u = universe(a.vars.as_deref(), p.input_vars().iter().cloned().chain(trace_names(&text)))?;
    let trace = parse_any_trace(&text, &u)?;
    let t = instant(a.at, &trace, true)?;
    let value = eval_program(&p, &trace, t, &q)?;
    let run = simulate(&p, &trace)?;
    let columns: serde_json::Map<String, Value> = p
        .defined_vars()
        .iter()
        .map(|v| (v.to_string(), json!(run.column(v).unwrap_or_default())))
        .collect();
    Ok(Outcome::ok(
        format!("{value}\n"),
        json!({ "query": q.to_string(), "t": t, "value": value, "variables": columns }),
    ))
}

fn run(a: RunArgs, cascade: bool) -> Result<Outcome, CliError> {
    let kind = if cascade { Kind::Cascade } else { Kind::Automaton };
    let artifact = load(&a.path, Some(kind), &ParseOptions::default())?;
    let inputs = match &artifact {
        Artifact::Automaton(x) => x.inputs().clone(),
        Artifact::Cascade(c) => c.external().clone(),
        _ => unreachable!("loaded by kind"),
    };
    let word = match (&a.word, &a.trace) {
        (Some(w), _) => inputs.parse_word(w)?,
        (None, Some(t)) => {
            let Alphabet::Bits(b) = &inputs else {
                return Err(CliError::usage("--trace needs a bit alphabet; use --word"));
            };
            let trace = parse_any_trace(&trace_text(t)?, &b.vars)?;
            trace.letters_over(&b.vars)
        }
        (None, None) => return Err(CliError::usage("give --word or --trace")),
    };
    let (outputs, alphabet, states, accepted) = match &artifact {
        Artifact::Automaton(x) => {
            let r = x.run(&word)?;
            let states: Vec<String> = r.states.iter().map(|&q| x.semi.states[q].clone()).collect();
            let acc = (x.is_acceptor() && !word.is_empty()).then(|| x.accepts(&word)).transpose()?;
            (r.outputs, x.outputs.clone(), states, acc)
        }
        Artifact::Cascade(c) => {
            let r = c.run(&word)?;
            let states = r
                .states
                .iter()
                .map(|q| {
                    let parts: Vec<&str> = q
                        .iter()
                        .zip(c.components())
                        .map(|(&qi, comp)| comp.semi.states[qi].as_str())
                        .collect();
                    format!("({})", parts.join(","))
                })
                .collect();
            let is_acceptor = c.outputs().accepting_letter().is_some();
            let acc = (is_acceptor && !word.is_empty()).then(|| c.accepts(&word)).transpose()?;
            (r.outputs, c.outputs().clone(), states, acc)
        }
        _ => unreachable!("loaded by kind"),
    };
    let names: Vec<String> = outputs.iter().map(|&g| alphabet.letter_name(g)).collect();
    let mut text = format!("states: {}\noutputs: {}\n", states.join(" "), names.join(" "));
    if let Some(acc) = accepted {
        text.push_str(&format!("accepted: {acc}\n"));
    }
    Ok(Outcome::ok(
        text,
        json!({ "states": states, "outputs": names, "accepted": accepted }),
    ))
}

fn compile(ctx: &Ctx, a: CompileArgs) -> Result<Outcome, CliError> {
    let artifact = load(&a.artifact, a.kind, &ctx.opts)?;
    let to = a.to.as_deref();
    let program_outcome = |p: krl_core::programs::Program, accept: Option<Variable>, extra: Value| {
        let mut text = p.to_string();
        if let Some(acc) = &accept {
            text.push_str(&format!("% accept: {acc}\n"));
        }
        let mut v = json!({
            "target": "program",
            "program": p.to_string(),
            "rules": p.len(),
            "size": p.size(),
            "accept": accept.map(|v| v.to_string()),
        });
        if let (Some(obj), Value::Object(e)) = (v.as_object_mut(), extra) {
            obj.extend(e);
        }
        Outcome::ok(text, v)
    };
    let cascade_outcome = |p: &krl_core::programs::Program| -> Result<Outcome, CliError> {
        let (c, wiring) = program_to_cascade(p)?;
        let wiring_json: Vec<Vec<String>> = wiring
            .outputs
            .iter()
            .map(|o| o.iter().map(|v| v.to_string()).collect())
            .collect();
        let text = serde_json::to_string_pretty(&c.to_json()).expect("serializable") + "\n";
        Ok(Outcome::ok(
            text,
            json!({ "target": "cascade", "cascade": c.to_json(), "components": c.len(), "outputs": wiring_json }),
        ))
    };
    match (artifact, to) {
        (Artifact::Formula(f), None | Some("program")) => {
            let (p, acc) = pltl_to_program(&f)?;
            Ok(program_outcome(p, Some(acc), json!({ "formula_size": f.desugar().size() })))
        }
        (Artifact::Formula(f), Some("cascade")) => cascade_outcome(&pltl_to_program(&f)?.0),
        (Artifact::Program { program, .. }, None | Some("cascade")) => cascade_outcome(&program),
        (Artifact::Automaton(x), None | Some("program")) => {
            let (p, w) = automaton_to_program(&x)?;
            let outs: Vec<String> = w.output_vars().iter().map(|v| v.to_string()).collect();
            Ok(program_outcome(p, None, json!({ "outputs": outs })))
        }
        (Artifact::Cascade(c), None | Some("program")) => {
            let (p, w) = cascade_to_program(&c)?;
            let outs: Vec<String> = w.output_vars().iter().map(|v| v.to_string()).collect();
            Ok(program_outcome(p, None, json!({ "outputs": outs })))
        }
        (_, Some(t)) => Err(CliError::usage(format!("cannot compile this artifact to `{t}`"))),
    }
}

fn unfold(ctx: &Ctx, a: UnfoldArgs) -> Result<Outcome, CliError> {
    let Artifact::Program { program, accept } = load(&a.program, Some(Kind::Program), &ctx.opts)? else {
        unreachable!("loaded by kind")
    };
    let var = match (a.var, accept) {
        (Some(v), _) => Variable::new_lenient(&v).map_err(|e| CliError::new(error::SYNTAX, e.to_string()))?,
        (None, Some(v)) => v,
        (None, None) => return Err(CliError::usage("name the variable with --var or `file.krl:var`")),
    };
    if !program.mentions(&var) {
        return Err(krl_core::programs::ProgramError::UnknownVariable(var).into());
    }
    let f = unfold_program(&program, &var)?;
    Ok(Outcome::ok(
        format!("{f}\n"),
        json!({ "variable": var.to_string(), "formula": f.to_string(), "size": f.size(), "program_size": program.size() }),
    ))
}

fn normalize(ctx: &Ctx, a: NormalizeArgs) -> Result<Outcome, CliError> {
    match load(&a.artifact, a.kind, &ctx.opts)? {
        Artifact::Formula(f) => {
            let (p, acc) = formula_to_normal_program(&f)?;
            Ok(Outcome::ok(
                format!("{p}% accept: {acc}\n"),
                json!({ "program": p.to_string(), "accept": acc.to_string(), "treelike": is_treelike(&p) }),
            ))
        }
        Artifact::Program { program, .. } => {
            let report = is_normal(&program);
            let treelike = is_treelike(&program);
            let mut text = format!("normal: {}\ntreelike: {treelike}\n", report.normal);
            for v in &report.violations {
                text.push_str(&format!("  {v}\n"));
            }
            Ok(Outcome {
                code: if report.normal { 0 } else { 1 },
                text,
                json: json!({ "normal": report.normal, "treelike": treelike, "violations": report.violations }),
            })
        }
        _ => Err(CliError::usage("normalize takes a formula or a program")),
    }
}

fn operator_factorization(ctx: &Ctx, name: &str) -> Result<Factorization, CliError> {
    let op = ctx.opts.registry.lookup(name)?;
    Ok(ctx.opts.registry.factorization(name).unwrap_or_else(|| Factorization {
        phi: InputFunction::identity(1 << op.arity),
        core: op.to_semiautomaton(),
    }))
}

fn semiautomaton_facts(ctx: &Ctx, d: &Semiautomaton) -> Result<(String, Value), CliError> {
    let s = characteristic_semigroup(d, &ctx.limits)?;
    let group = s.is_group();
    let simple = if group { Some(is_simple_group(&s, &ctx.limits)?) } else { None };
    let flip_flop = s.is_flip_flop_monoid();
    let prime = is_prime_semiautomaton(d, &ctx.limits)?;
    let summary = if flip_flop {
        format!("flip-flop monoid, {} elements", s.len())
    } else if group {
        let simple = if simple == Some(true) { "simple" } else { "not simple" };
        format!("group of order {}, {simple}", s.len())
    } else if s.is_monoid() {
        format!("monoid, {} elements", s.len())
    } else {
        format!("semigroup, {} elements", s.len())
    };
    let text = format!(
        "{summary}\nstates: {}\nletters: {}\nflip-flop semiautomaton: {}\nprime: {prime}\n",
        d.n_states(),
        d.n_letters(),
        is_flip_flop_semiautomaton(d),
    );
    let v = json!({
        "summary": summary,
        "states": d.n_states(),
        "letters": d.n_letters(),
        "elements": s.len(),
        "monoid": s.is_monoid(),
        "group": group,
        "simple_group": simple,
        "flip_flop_monoid": flip_flop,
        "commutative": s.is_commutative(),
        "prime": prime,
    });
    Ok((text, v))
}

fn algebra(ctx: &Ctx, a: AlgebraArgs) -> Result<Outcome, CliError> {
    match (&a.automaton, &a.operator) {
        (Some(path), _) => {
            let Artifact::Automaton(x) = load(path, Some(Kind::Automaton), &ctx.opts)? else {
                unreachable!("loaded by kind")
            };
            let (mut text, mut v) = semiautomaton_facts(ctx, &x.semi)?;
            let mut code = 0;
            if let Some(other) = &a.similar {
                let Artifact::Automaton(y) = load(other, Some(Kind::Automaton), &ctx.opts)? else {
                    unreachable!("loaded by kind")
                };
                let iso = semiautomata_isomorphic(&x.semi, &y.semi, &ctx.limits)?.is_some();
                text.push_str(&format!("isomorphic: {iso}\n"));
                v["isomorphic"] = json!(iso);
                code = u8::from(!iso);
            }
            Ok(Outcome { code, text, json: v })
        }
        (None, Some(name)) => {
            let f = operator_factorization(ctx, name)?;
            let (mut text, mut v) = semiautomaton_facts(ctx, &f.core)?;
            let prime = is_prime_operator(&f, &ctx.limits)?;
            text.push_str(&format!("prime operator: {prime}\n"));
            v["prime_operator"] = json!(prime);
            let mut code = 0;
            if let Some(other) = &a.similar {
                let g = operator_factorization(ctx, other)?;
                let similar = operators_similar(&f, &g, &ctx.limits)?;
                text.push_str(&format!("similar to {other}: {similar}\n"));
                v["similar"] = json!(similar);
                code = u8::from(!similar);
            }
            Ok(Outcome { code, text, json: v })
        }
        (None, None) => Err(CliError::usage("give --automaton or --operator")),
    }
}

fn budget(flag: Option<u64>) -> Result<u64, CliError> {
    if let Some(b) = flag {
        return Ok(b);
    }
    match std::env::var("KRLC_BUDGET") {
        Ok(s) => s
            .trim()
            .parse()
            .map_err(|_| CliError::usage(format!("KRLC_BUDGET must be a number, got `{s}`"))),
        Err(_) => Ok(DEFAULT_BUDGET),
    }
}

fn equiv(ctx: &Ctx, a: EquivArgs) -> Result<Outcome, CliError> {
    let budget = budget(a.budget)?;
    let left = load(&a.left, a.left_kind, &ctx.opts)?;
    let right = a.right.as_deref().map(|r| load(r, a.right_kind, &ctx.opts)).transpose()?;
    let inferred = left.vars().into_iter().chain(right.iter().flat_map(Artifact::vars));
    let u = universe(a.vars.as_deref(), inferred)?;
    let names: Vec<String> = u.iter().map(|v| v.to_string()).collect();
    let l = left.recognizer(u.clone())?;

    let Some(right) = right else {
        let size = a.search.expect("required by clap");
        let r = bounded_nonexpressibility(&l, &u, size, a.maxlen, budget)?;
        let found = r.found.as_ref().map(|f| f.to_string());
        let text = match &found {
            Some(f) => format!("found: {f}\n"),
            None => format!(
                "none: no formula of size <= {size} matches on traces up to length {} ({} formulas, {} behaviours)\n",
                a.maxlen, r.formulas_checked, r.behaviours
            ),
        };
        return Ok(Outcome {
            code: u8::from(found.is_none()),
            text,
            json: json!({ "vars": names, "max_size": size, "maxlen": a.maxlen, "found": found,
                          "formulas_checked": r.formulas_checked, "behaviours": r.behaviours }),
        });
    };

    let r = right.recognizer(u.clone())?;
    let report = bounded_equiv_with_budget(&l, &r, a.maxlen, budget)?;
    let equal = matches!(report.verdict, Verdict::EqualUpTo(_));
    let cex = report.counterexample.as_ref().map(|t| t.to_string());
    Ok(Outcome {
        code: u8::from(!equal),
        text: format!("{report}\n"),
        json: json!({
            "vars": names,
            "maxlen": a.maxlen,
            "equal": equal,
            "checked": report.checked,
            "counterexample": cex,
            "accepted_by": report.left_accepts.map(|l| if l { "left" } else { "right" }),
        }),
    })
}

fn operators(ctx: &Ctx, a: OperatorsArgs) -> Result<Outcome, CliError> {
    let names: Vec<String> = match &a.name {
        Some(n) => vec![n.clone()],
        None => ["F", "S", "P", "C2", "C3", "C4", "Cs2", "Cs3", "Cs4"].map(String::from).to_vec(),
    };
    let mut text = String::new();
    let mut rows = Vec::new();
    for n in &names {
        let op = ctx.opts.registry.lookup(n)?;
        let prime = is_prime_operator(&operator_factorization(ctx, n)?, &ctx.limits)?;
        text.push_str(&format!(
            "{n}: {} inputs, {} states, init {}, prime {prime}\n",
            op.arity,
            op.n_states(),
            op.init + 1
        ));
        if a.name.is_some() {
            for (q, row) in op.delta.iter().enumerate() {
                let cells: Vec<String> = row.iter().map(|q| (q + 1).to_string()).collect();
                text.push_str(&format!("  {}: {}\n", q + 1, cells.join(" ")));
            }
        }
        rows.push(json!({ "name": n, "automaton": op.to_json(), "prime": prime }));
    }
    if a.name.is_none() {
        text.push_str(&format!(
            "C<n> and Cs<n> exist for every n >= 2; counter convention: {}\n",
            ctx.opts.registry.convention()
        ));
    }
    Ok(Outcome::ok(
        text,
        json!({ "operators": rows, "counter_convention": ctx.opts.registry.convention().to_string() }),
    ))
}
