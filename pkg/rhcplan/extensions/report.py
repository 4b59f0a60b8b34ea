# html summary of a mission

from pathlib import Path

from jinja2 import Environment, FileSystemLoader
import rhcplan
from .. utilities import nice_title

__all__ = ['render_summary']


def render_summary(log, svgs, path=None):
    """
    Summary page: the summary table, the counts of relaxed and violating steps and the
    SVG renderings inline.

    :param log: MissionLog
    :param svgs: dict file name -> SVG text
    :param path: where to write the page; returned as text either way
    """
    env = Environment(loader=FileSystemLoader(Path(rhcplan.__file__).parent / 'templates'),
                      autoescape=(['html', 'xml']))
    template = env.get_template('summary.html')
    summary = log.summary().drop(columns=['mean_time', 'max_time'])
    html = template.render(title=nice_title(f'{log.meta["name"]} mission'),
                           table=summary.to_html(index=False, float_format=lambda x: f'{x:,.2f}'),
                           relaxations=[int(k) for k in log.relaxations],
                           violations=len(log.violation_events),
                           lasso=log.executed_lasso(),
                           svgs=[(nice_title(Path(n).stem), s) for n, s in svgs.items()])
    if path is not None:
        Path(path).write_text(html, encoding='utf-8')
    return html
