export {
  FIGURE_KINDS,
  FigureKind,
  FigureSpec,
  RenderAllResult,
  parseFigureSpec,
  render,
  renderAll,
} from "./figures.js";
export {
  FIELD_COLUMNS,
  RECORD_COLUMNS,
  SchemaError,
  Table,
  parseCsv,
  readFieldCsv,
  readOutcomeJson,
  readRecordsCsv,
  readSummaryJson,
} from "./csv.js";
export { encodePng } from "./png.js";
export { Canvas, COLORS, renderPlot } from "./plot.js";
