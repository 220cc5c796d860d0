// Generated by wasm-bindgen into ./pkg (see README).
import init, { classifyCsv, checkFd, prioritize, plantedCsv } from "./pkg/normdebt_web.js";

const $ = (id) => document.getElementById(id);

function show(id, run) {
  const out = $(id);
  try {
    out.classList.remove("error");
    out.textContent = run();
  } catch (e) {
    out.classList.add("error");
    out.textContent = String(e.message ?? e);
  }
}

function pretty(json) {
  return JSON.stringify(JSON.parse(json), null, 2);
}

function rankTable(report) {
  const lines = report.rows.map(
    (r) => `${r.table.padEnd(22)} cost ${r.cost_rank}  impact ${r.criterion_rank}  ${r.decision.padEnd(9)} ${r.principal}`,
  );
  lines.push("");
  lines.push(`per task ${report.rate} USD`);
  lines.push(`normalize now: ${report.option.tables.join(", ") || "(none)"} = ${report.option.total} USD`);
  lines.push(`all debt tables: ${report.conventional} USD`);
  return lines.join("\n");
}

await init();

$("generate").onclick = () =>
  show("classify-out", () => {
    $("csv").value = plantedCsv($("defect").value, Number($("seed").value));
    return pretty(classifyCsv($("csv").value, Number($("tau").value), Number($("arity").value)));
  });

$("classify").onclick = () =>
  show("classify-out", () => pretty(classifyCsv($("csv").value, Number($("tau").value), Number($("arity").value))));

$("fd").onclick = () =>
  show("fd-out", () => pretty(checkFd($("csv").value, $("lhs").value, $("rhs").value, Number($("tau").value))));

$("prioritize").onclick = () =>
  show("prioritize-out", () => {
    const report = JSON.parse(
      prioritize($("rows").value, Number($("wage").value), Number($("minutes").value), $("view").value),
    );
    $("matrix").innerHTML = report.svg;
    return rankTable(report);
  });

$("classify").click();
$("prioritize").click();
