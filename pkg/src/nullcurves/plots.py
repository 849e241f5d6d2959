"""Minimal self-contained SVG line plots with deterministic output."""
import numpy as np

_COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]


def _fmt(x):
    return f"{x:.2f}"


class LinePlot:
    def __init__(self, title="", xlabel="", ylabel="", width=640, height=480):
        self.title, self.xlabel, self.ylabel = title, xlabel, ylabel
        self.width, self.height = width, height
        self.series = []
        self.notes = []

    def line(self, x, y, label="", dashed=False, points=False):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        self.series.append((x, y, label, dashed, points))
        return self

    def note(self, text):
        self.notes.append(text)
        return self

    def _bounds(self):
        xs = [s[0][np.isfinite(s[0]) & np.isfinite(s[1])] for s in self.series]
        ys = [s[1][np.isfinite(s[0]) & np.isfinite(s[1])] for s in self.series]
        xs = np.concatenate(xs) if xs else np.zeros(1)
        ys = np.concatenate(ys) if ys else np.zeros(1)
        if xs.size == 0:
            xs = ys = np.zeros(1)
        x0, x1, y0, y1 = xs.min(), xs.max(), ys.min(), ys.max()
        if x1 - x0 < 1e-12:
            x0, x1 = x0 - 1, x1 + 1
        if y1 - y0 < 1e-12:
            y0, y1 = y0 - 1, y1 + 1
        return x0, x1, y0, y1

    def render(self):
        W, H, pad = self.width, self.height, 60
        x0, x1, y0, y1 = self._bounds()

        def X(x):
            return pad + (x - x0) / (x1 - x0) * (W - 2 * pad)

        def Y(y):
            return H - pad - (y - y0) / (y1 - y0) * (H - 2 * pad)

        out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" '
               f'viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">',
               f'<rect x="0" y="0" width="{W}" height="{H}" fill="#ffffff"/>',
               f'<rect x="{pad}" y="{pad}" width="{W - 2 * pad}" height="{H - 2 * pad}" '
               'fill="none" stroke="#444444" stroke-width="1"/>',
               f'<text x="{W / 2:.1f}" y="{pad / 2:.1f}" text-anchor="middle" font-size="14">{_esc(self.title)}</text>',
               f'<text x="{W / 2:.1f}" y="{H - 15}" text-anchor="middle">{_esc(self.xlabel)}</text>',
               f'<text x="15" y="{H / 2:.1f}" text-anchor="middle" '
               f'transform="rotate(-90 15 {H / 2:.1f})">{_esc(self.ylabel)}</text>']
        for v, anchor, xx, yy in ((x0, "start", pad, H - pad + 15), (x1, "end", W - pad, H - pad + 15)):
            out.append(f'<text x="{xx}" y="{yy}" text-anchor="{anchor}">{v:.4g}</text>')
        for v, yy in ((y0, H - pad), (y1, pad + 10)):
            out.append(f'<text x="{pad - 5}" y="{yy}" text-anchor="end">{v:.4g}</text>')
        for i, (x, y, label, dashed, points) in enumerate(self.series):
            color = _COLORS[i % len(_COLORS)]
            ok = np.isfinite(x) & np.isfinite(y)
            if points:
                for a, b in zip(x[ok], y[ok]):
                    out.append(f'<circle cx="{_fmt(X(a))}" cy="{_fmt(Y(b))}" r="1.5" fill="{color}"/>')
            else:
                # break the polyline at non-finite samples
                runs, cur = [], []
                for a, b, good in zip(x, y, ok):
                    if good:
                        cur.append(f"{_fmt(X(a))},{_fmt(Y(b))}")
                    elif cur:
                        runs.append(cur)
                        cur = []
                if cur:
                    runs.append(cur)
                dash = ' stroke-dasharray="6 4"' if dashed else ""
                for r in runs:
                    out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5"{dash} '
                               f'points="{" ".join(r)}"/>')
            if label:
                ly = pad + 20 + 16 * i
                out.append(f'<text x="{W - pad - 10}" y="{ly}" text-anchor="end" fill="{color}">{_esc(label)}</text>')
        for j, text in enumerate(self.notes):
            out.append(f'<text x="{pad + 10}" y="{pad + 20 + 16 * j}">{_esc(text)}</text>')
        out.append("</svg>")
        return "\n".join(out) + "\n"

    def save(self, path):
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            f.write(self.render())


def _esc(s):
    return str(s).replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
