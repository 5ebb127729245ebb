/** Tiny SVG string builder; enough for lines, polylines, circles and text. */

export type Attributes = Record<string, string | number>;

export function escapeText(value: string): string {
  return value
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function renderAttributes(attributes: Attributes): string {
  return Object.entries(attributes)
    .map(([key, value]) => ` ${key}="${typeof value === "number" ? fmt(value) : escapeText(value)}"`)
    .join("");
}

/** Fixed-precision pixel coordinates keep the output byte-stable. */
export function fmt(value: number): string {
  const rounded = Math.round(value * 100) / 100;
  return Object.is(rounded, -0) ? "0" : String(rounded);
}

export function element(tag: string, attributes: Attributes, children?: string[]): string {
  const attrs = renderAttributes(attributes);
  if (children === undefined || children.length === 0) {
    return `<${tag}${attrs}/>`;
  }
  return `<${tag}${attrs}>${children.join("")}</${tag}>`;
}

export function text(content: string, attributes: Attributes): string {
  return `<text${renderAttributes(attributes)}>${escapeText(content)}</text>`;
}

export function document(width: number, height: number, children: string[]): string {
  const header =
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}"` +
    ` viewBox="0 0 ${width} ${height}">`;
  return `${header}${children.join("")}</svg>\n`;
}
