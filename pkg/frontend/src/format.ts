/** Display conventions shared by every view: fixed decimals, no locale. */

export function fmtProb(value: number): string {
  return value.toFixed(4);
}

export function fmtEss(value: number): string {
  return value.toFixed(2);
}

export function fmtPct(value: number): string {
  return value.toFixed(1);
}

export function fmtSlack(value: number): string {
  const sign = value >= 0 ? "+" : "";
  return `${sign}${value.toFixed(4)}`;
}

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}
