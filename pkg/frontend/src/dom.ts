/** Small DOM construction helpers shared by the panels. */

export interface ElProps {
  class?: string;
  text?: string;
  title?: string;
  dataset?: Record<string, string>;
  disabled?: boolean;
  placeholder?: string;
  value?: string;
  type?: string;
  onClick?: (ev: MouseEvent) => void;
  onDblClick?: (ev: MouseEvent) => void;
}

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  props: ElProps = {},
  children: (HTMLElement | SVGElement | string)[] = [],
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (props.class) node.className = props.class;
  if (props.text !== undefined) node.textContent = props.text;
  if (props.title !== undefined) node.title = props.title;
  if (props.dataset) {
    for (const [k, v] of Object.entries(props.dataset)) node.dataset[k] = v;
  }
  if (props.disabled && "disabled" in node) {
    (node as unknown as { disabled: boolean }).disabled = true;
  }
  if (props.placeholder !== undefined && "placeholder" in node) {
    (node as unknown as { placeholder: string }).placeholder = props.placeholder;
  }
  if (props.value !== undefined && "value" in node) {
    (node as unknown as { value: string }).value = props.value;
  }
  if (props.type !== undefined && "type" in node) {
    (node as unknown as { type: string }).type = props.type;
  }
  if (props.onClick) {
    const handler = props.onClick;
    node.addEventListener("click", (ev) => handler(ev as MouseEvent));
  }
  if (props.onDblClick) {
    const handler = props.onDblClick;
    node.addEventListener("dblclick", (ev) => handler(ev as MouseEvent));
  }
  for (const child of children) {
    node.append(child instanceof Node ? child : document.createTextNode(child));
  }
  return node;
}

export function clear(node: HTMLElement): void {
  while (node.firstChild) node.removeChild(node.firstChild);
}

const SVG_NS = "http://www.w3.org/2000/svg";

export function svgEl(tag: string, attrs: Record<string, string>): SVGElement {
  const node = document.createElementNS(SVG_NS, tag);
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, v);
  return node;
}
