// Swipe recognition for back navigation.

export type SwipeDirection = 'left' | 'right';

export interface SwipeOptions {
  minDistancePx?: number;
  maxAngleDeg?: number;
}

const DEFAULTS = { minDistancePx: 60, maxAngleDeg: 30 };

// Pure classifier over the start-to-end delta.  A gesture counts when
// it travels far enough and stays close enough to horizontal.
export function classifySwipe(
  dx: number,
  dy: number,
  options: SwipeOptions = {},
): SwipeDirection | null {
  const { minDistancePx, maxAngleDeg } = { ...DEFAULTS, ...options };
  if (Math.abs(dx) < minDistancePx) return null;
  const angle = (Math.atan2(Math.abs(dy), Math.abs(dx)) * 180) / Math.PI;
  if (angle >= maxAngleDeg) return null;
  return dx > 0 ? 'right' : 'left';
}

interface TouchPoint {
  clientX: number;
  clientY: number;
}

interface TouchEventLike {
  touches: ArrayLike<TouchPoint>;
  changedTouches: ArrayLike<TouchPoint>;
}

export interface TouchTarget {
  addEventListener(type: string, fn: (evt: any) => void): void;
  removeEventListener(type: string, fn: (evt: any) => void): void;
}

export function attachSwipe(
  target: TouchTarget,
  onSwipe: (dir: SwipeDirection) => void,
  options: SwipeOptions = {},
): () => void {
  let startX = 0;
  let startY = 0;
  const onStart = (evt: TouchEventLike) => {
    if (evt.touches.length === 0) return;
    startX = evt.touches[0].clientX;
    startY = evt.touches[0].clientY;
  };
  const onEnd = (evt: TouchEventLike) => {
    if (evt.changedTouches.length === 0) return;
    const dir = classifySwipe(
      evt.changedTouches[0].clientX - startX,
      evt.changedTouches[0].clientY - startY,
      options,
    );
    if (dir) onSwipe(dir);
  };
  target.addEventListener('touchstart', onStart);
  target.addEventListener('touchend', onEnd);
  return () => {
    target.removeEventListener('touchstart', onStart);
    target.removeEventListener('touchend', onEnd);
  };
}
