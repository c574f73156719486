/** Minimal SVG document builder (string based, no DOM). */

export type Attrs = Record<string, string | number>;

function renderAttrs(attrs: Attrs): string {
  return Object.entries(attrs)
    .map(([key, value]) => ` ${key}="${String(value)}"`)
    .join("");
}

export function tag(name: string, attrs: Attrs, children?: string[]): string {
  if (children === undefined || children.length === 0) {
    return `<${name}${renderAttrs(attrs)}/>`;
  }
  return `<${name}${renderAttrs(attrs)}>${children.join("")}</${name}>`;
}

export function text(content: string, attrs: Attrs): string {
  return `<text${renderAttrs(attrs)}>${escapeText(content)}</text>`;
}

export function escapeText(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export function svgDocument(width: number, height: number, children: string[]): string {
  const open =
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
    `viewBox="0 0 ${width} ${height}">`;
  return `${open}\n${children.join("\n")}\n</svg>\n`;
}
