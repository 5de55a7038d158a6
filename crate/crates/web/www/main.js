import init, { derive, and_join_lattice_svg, event_graph_svg } from "./pkg/ca2om_web.js";

const SAMPLE = `# Events I to IV in sequence. Class C is created by II and extended by IV.
objects: Alpha, C, Beta

process S "Sketch"
  START -> I
  I -> II
  II -> III
  III -> IV
  IV -> END

  event I "First event"
    primary: Clerk
    interface: Clerk
    message:
      ALPHA =
      < Alpha code + | g | number | 1
      Alpha date     | i | date | 01-01-2010
      >
    identifier: Alpha code
  end

  event II "Second event"
    primary: Clerk
    interface: Clerk
    message:
      C =
      < C code + | g | number | 7
      Alpha      | i | Alpha | 1
      >
    restriction: Alpha 1:1 0:M
    identifier: C code
  end

  event III "Third event"
    primary: Clerk
    interface: Clerk
    message:
      BETA =
      < Beta code + | g | number | 3
      Beta amount   | i | money | 10
      >
    identifier: Beta code
  end

  event IV "Fourth event"
    primary: Manager
    interface: Manager
    message:
      C UPDATE =
      < C + | i | C | 7 | True
      Closing date | i | date | 02-02-2010
      >
  end
end
`;

const $ = (id) => document.getElementById(id);

function escapeHtml(text) {
  return text.replace(/[&<>"]/g, (c) => ({ "&": "&amp;", "<": "&lt;", ">": "&gt;", '"': "&quot;" }[c]));
}

function classTable(cls) {
  const rows = cls.attributes
    .map((a) => `<tr><td>${escapeHtml(a.name)}</td><td>${a.id ? "yes" : "no"}</td><td>${a.attr_type}</td>`
      + `<td>${a.data_type}</td><td>${a.size ?? "-"}</td><td>${a.requested ? "yes" : "no"}</td>`
      + `<td>${a.null_allowed ? "yes" : "no"}</td></tr>`)
    .join("");
  const services = cls.services
    .map((s) => `${escapeHtml(s.name)}(${s.arguments.map((a) => escapeHtml(a.name)).join(", ")})`)
    .join("<br>");
  return `<h3>${escapeHtml(cls.name)}</h3>`
    + `<table><tr><th>attribute</th><th>id</th><th>type</th><th>data type</th><th>size</th><th>requested</th><th>null</th></tr>${rows}</table>`
    + `<p>${services}</p>`;
}

function runDerive() {
  const result = JSON.parse(derive($("carm").value, $("ann").value, $("self-loops").checked));
  $("diagnostics").innerHTML = result.diagnostics
    .map((d) => `<div class="diag${d.startsWith("ERROR") ? " error" : ""}">${escapeHtml(d)}</div>`)
    .join("");
  if (!result.ok) {
    $("classes").innerHTML = "";
    $("diagrams").innerHTML = "";
    return;
  }
  $("classes").innerHTML = "<h2>Classes</h2>" + result.model.classes.map(classTable).join("")
    + "<h2>Relationships</h2><pre>" + escapeHtml(result.model.relationships
      .map((r) => `${r.classA} ${r.cardA.min}:${r.cardA.max} --- ${r.cardB.min}:${r.cardB.max} ${r.classB}  (${r.origin})`)
      .join("\n")) + "</pre>";
  $("diagrams").innerHTML = "<h2>State-transition diagrams</h2>" + result.diagrams
    .map((d) => `<h3>${escapeHtml(d.class)}</h3><div class="figure">${d.svg}</div>`)
    .join("");
}

function drawGraph() {
  $("event-graph").innerHTML = event_graph_svg($("carm").value, $("process").value);
}

function drawLattice() {
  const k = Number($("k").value);
  $("k-value").textContent = k;
  $("lattice").innerHTML = and_join_lattice_svg(k);
}

await init();
$("carm").value = SAMPLE;
$("derive").addEventListener("click", runDerive);
$("load-sample").addEventListener("click", () => { $("carm").value = SAMPLE; $("ann").value = ""; runDerive(); drawGraph(); });
$("draw-graph").addEventListener("click", drawGraph);
$("k").addEventListener("input", drawLattice);
runDerive();
drawGraph();
drawLattice();
