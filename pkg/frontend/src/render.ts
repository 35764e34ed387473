/** String-based rendering helpers: views build HTML strings so every screen
 * is testable in plain Node, and only main.ts touches the real DOM. */

export function escapeHtml(text: string): string {
  return text
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;");
}

export function el(tag: string, className: string, inner: string): string {
  return `<${tag} class="${className}">${inner}</${tag}>`;
}

export function renderMarkdown(markdown: string): string {
  // plain-textarea editing pairs with a deliberately small preview renderer:
  // headings, numbered/bulleted lines, paragraphs
  const blocks: string[] = [];
  for (const line of markdown.split("\n")) {
    if (line.startsWith("## ")) {
      blocks.push(el("h2", "md-heading", escapeHtml(line.slice(3))));
    } else if (/^\d+\.\s/.test(line)) {
      blocks.push(el("li", "md-item", escapeHtml(line)));
    } else if (line.trim()) {
      blocks.push(el("p", "md-para", escapeHtml(line)));
    }
  }
  return blocks.join("\n");
}
