//! `export-lp`: build the requested model and write it in LP text format
//! for an external solver. The companion `import-solution` command reads the
//! solver's variable values back.

use std::collections::BTreeMap;

use clap::Args;
use serde::Serialize;

use freqset_core::milp::write_lp;

use crate::commands::{
    build_model, CliError, CommonArgs, ManifestDto, ModelArgs, ReductionDto, Workspace,
};
use crate::config::ConfigEcho;
use crate::report::{write_json, write_text};

#[derive(Args, Clone, Debug)]
pub struct ExportLpArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    /// Output file name inside the output directory.
    #[arg(long, default_value = "model.lp")]
    pub file_name: String,
}

#[derive(Serialize)]
struct ExportReport {
    config: ConfigEcho,
    model: ManifestDto,
    output: String,
    /// Variable names the LP sanitizer had to rename (original → exported).
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    renamed: BTreeMap<String, String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    reduction: Option<ReductionDto>,
}

pub fn run(args: &ExportLpArgs) -> Result<(), CliError> {
    let workspace = Workspace::open(&args.common, args.model.overrides())?;
    let (built, context) = build_model(&workspace, &args.model)?;
    let export = write_lp(&built.model).map_err(|e| CliError::Build(e.to_string()))?;
    write_text(&workspace.out(&args.file_name), &export.text)?;

    let mut echo = workspace.echo("export-lp", Some(args.model.model), &args.common.instance);
    for (role, path) in &context.echo_inputs {
        echo = echo.with_input(role, path);
    }
    let report = ExportReport {
        config: echo,
        model: ManifestDto::from(&built.manifest),
        output: args.file_name.clone(),
        renamed: export.renamed,
        reduction: context.reduction.as_ref().map(ReductionDto::from),
    };
    write_json(&workspace.out("export-lp.json"), &report)?;

    println!(
        "export-lp: {} variables, {} constraints -> {}",
        report.model.variables,
        report.model.constraints,
        workspace.out(&args.file_name).display()
    );
    Ok(())
}
