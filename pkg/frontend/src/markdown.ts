// Minimal client-side Markdown rendering for cell text segments.
// Headings, fenced code, unordered lists, paragraphs, and inline
// code/bold/italic/links; everything else passes through as text.

const escapeHtml = (text: string): string =>
  text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");

const INLINE_RULES: [RegExp, string][] = [
  [/`([^`]+)`/g, "<code>$1</code>"],
  [/\*\*([^*]+)\*\*/g, "<strong>$1</strong>"],
  [/\*([^*]+)\*/g, "<em>$1</em>"],
  [/!\[([^\]]*)\]\(([^)]+)\)/g, '<img alt="$1" src="$2">'],
  [/\[([^\]]+)\]\(([^)]+)\)/g, '<a href="$2">$1</a>'],
];

function inline(text: string): string {
  let out = escapeHtml(text);
  for (const [pattern, replacement] of INLINE_RULES) {
    out = out.replace(pattern, replacement);
  }
  return out;
}

export function markdownToHtml(text: string): string {
  const out: string[] = [];
  let paragraph: string[] = [];
  let listItems: string[] = [];
  let fence: string[] | null = null;

  const flush = () => {
    if (paragraph.length) {
      out.push(`<p>${inline(paragraph.join(" "))}</p>`);
      paragraph = [];
    }
    if (listItems.length) {
      out.push(`<ul>${listItems.map((item) => `<li>${item}</li>`).join("")}</ul>`);
      listItems = [];
    }
  };

  for (const line of text.split("\n")) {
    if (fence !== null) {
      if (line.trim().startsWith("```")) {
        out.push(`<pre><code>${escapeHtml(fence.join("\n"))}</code></pre>`);
        fence = null;
      } else {
        fence.push(line);
      }
      continue;
    }
    if (line.trim().startsWith("```")) {
      flush();
      fence = [];
      continue;
    }
    const heading = /^(#{1,6})\s+(.*)$/.exec(line);
    if (heading) {
      flush();
      const level = heading[1].length;
      out.push(`<h${level}>${inline(heading[2])}</h${level}>`);
      continue;
    }
    const item = /^\s*[-*]\s+(.*)$/.exec(line);
    if (item) {
      if (paragraph.length) flush();
      listItems.push(inline(item[1]));
      continue;
    }
    if (!line.trim()) {
      flush();
      continue;
    }
    if (listItems.length) flush();
    paragraph.push(line.trim());
  }
  if (fence !== null) {
    out.push(`<pre><code>${escapeHtml(fence.join("\n"))}</code></pre>`);
  }
  flush();
  return out.join("\n");
}
