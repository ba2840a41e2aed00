export { parseCsv, readCsv, requireColumns, column, SchemaError } from "./csv.js";
export { readMeta, chartGeometry, modelSummary, MetadataError } from "./meta.js";
export { render, FIGURE_KINDS } from "./figures.js";
export { Figure, Scale, colormap, extent, ticks } from "./svg.js";
